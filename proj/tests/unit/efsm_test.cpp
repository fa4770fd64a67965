#include <doctest.h>

#include <nlohmann/json.hpp>

#include "mpst/efsm.hpp"
#include "mpst/efsm_io.hpp"
#include "mpst/parser.hpp"
#include "mpst/projector.hpp"
#include "support/corpus.hpp"
#include "support/efsm_oracles.hpp"

using namespace mpst;

namespace {

Efsm efsm_of(const ast::ScribbleModule& m, const std::string& p, const std::string& r) {
  return to_efsm(*project(m, p, r), p, r);
}

std::vector<std::string> labels_from(const Efsm& e, StateId s) {
  std::vector<std::string> out;
  for (const auto* t : e.outgoing(s)) out.push_back(t->label);
  return out;
}

}  // namespace

TEST_CASE("end becomes a single terminal state") {
  auto e = to_efsm(*make_end(), "P", "A");
  CHECK(e.states == std::vector<StateKind>{StateKind::terminal});
  CHECK(e.initial == 0);
  CHECK(e.terminal == 0);
  CHECK(e.transitions.empty());
  CHECK(check_invariants(e).empty());
}

TEST_CASE("Game attacker machine") {
  auto m = testing::load("battleship.scr");
  auto e = efsm_of(m, "Game", "Atk");
  CHECK(check_invariants(e).empty());
  CHECK(e.states[static_cast<std::size_t>(e.initial)] == StateKind::output);
  auto first = e.outgoing(e.initial);
  REQUIRE(first.size() == 1);
  CHECK(first[0]->action == Action::send);
  CHECK(first[0]->label == "Attack");
  CHECK(first[0]->peer == "Svr");
  const StateId reply = first[0]->to;
  CHECK(e.states[static_cast<std::size_t>(reply)] == StateKind::input);
  CHECK(labels_from(e, reply) == std::vector<std::string>{"Hit", "Miss", "Sunk", "Winner"});

  SUBCASE("hit loops back to attacking, miss switches to defending") {
    for (const auto* t : e.outgoing(reply)) {
      if (t->label == "Hit" || t->label == "Sunk") CHECK(t->to == e.initial);
      if (t->label == "Miss") {
        auto next = e.outgoing(t->to);
        REQUIRE_FALSE(next.empty());
        CHECK(next[0]->action == Action::receive);
        CHECK(labels_from(e, t->to) == std::vector<std::string>{"Hit", "Miss", "Loser"});
      }
    }
  }

  SUBCASE("role swap makes the machine larger than a fixed-role loop") {
    auto fixed = ast::parse_module(
        "module G; type Location as \"L\";\n"
        "global protocol Game(role Atk, role Svr, role Def) {\n"
        "  Attack(Location) from Atk to Svr;\n"
        "  choice at Svr { Hit() from Svr to Atk; Hit(Location) from Svr to Def; do Game(Atk, Svr, Def); }\n"
        "  or { Miss() from Svr to Atk; Miss(Location) from Svr to Def; do Game(Atk, Svr, Def); }\n"
        "  or { Winner() from Svr to Atk; Loser() from Svr to Def; } }");
    CHECK(e.state_count() > efsm_of(fixed, "Game", "Atk").state_count());
  }
}

TEST_CASE("invariants hold for every corpus machine before and after splitting") {
  for (const auto& f : testing::valid_corpus()) {
    auto m = testing::load(f);
    for (const auto& p : m.protocols) {
      for (const auto& r : p.role_params) {
        CAPTURE(p.name);
        CAPTURE(r);
        auto e = efsm_of(m, p.name, r);
        CHECK(check_invariants(e).empty());
        auto s = split_labels(e);
        CHECK(check_invariants(s).empty());
        CHECK(split_labels(s) == s);
        CHECK(testing::canonical(split_labels(s)) == testing::canonical(s));
        CHECK(testing::bisimilar(e, s, 12));
        CHECK(efsm_of(m, p.name, r) == e);
      }
    }
  }
}

TEST_CASE("label splitting") {
  SUBCASE("identity on single-transition states") {
    auto m = ast::parse_module("module M; global protocol P(role A, role B) { X() from A to B; Y() from B to A; }");
    auto e = efsm_of(m, "P", "A");
    CHECK(split_labels(e) == e);
  }
  SUBCASE("three-way branch of P2") {
    auto m = testing::load("battleship.scr");
    auto e = split_labels(efsm_of(m, "BattleShips", "P2"));
    StateId s = e.initial;
    REQUIRE(e.outgoing(s).size() == 1);
    CHECK(e.outgoing(s)[0]->action == Action::connect);
    s = e.outgoing(s)[0]->to;
    REQUIRE(e.outgoing(s).size() == 1);
    CHECK(e.outgoing(s)[0]->label == "Init");
    s = e.outgoing(s)[0]->to;
    CHECK(labels_from(e, s) == std::vector<std::string>{"hit", "miss", "loser"});
    for (const auto* t : e.outgoing(s)) {
      CHECK(t->payloads.empty());
      auto next = e.outgoing(t->to);
      REQUIRE(next.size() == 1);
      CHECK(next[0]->action == Action::receive);
      CHECK(testing::lowercase(next[0]->label) == t->label);
    }
  }
  SUBCASE("hand-split attacker branch") {
    auto m = testing::load("battleship.scr");
    auto e = efsm_of(m, "Game", "Atk");
    auto s = split_labels(e);
    const StateId reply = e.outgoing(e.initial)[0]->to;
    auto edges = s.outgoing(reply);
    REQUIRE(edges.size() == 4);
    for (const auto* t : edges) {
      CHECK(t->to >= static_cast<StateId>(e.state_count()));
      CHECK(s.outgoing(t->to).size() == 1);
      CHECK(s.states[static_cast<std::size_t>(t->to)] == StateKind::input);
    }
  }
}

TEST_CASE("JSON export") {
  SUBCASE("terminal-only") {
    auto e = to_efsm(*make_end(), "P", "A");
    auto j = nlohmann::json::parse(export_efsm_json(e));
    CHECK(j["states"].size() == 1);
    CHECK(j["transitions"].empty());
    CHECK(j["terminal"] == 0);
    CHECK(j["initial"] == 0);
  }
  SUBCASE("keys are exactly the interchange schema") {
    auto m = testing::load("battleship.scr");
    auto j = nlohmann::json::parse(export_efsm_json(split_labels(efsm_of(m, "BattleShips", "P2"))));
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    std::sort(keys.begin(), keys.end());
    CHECK(keys == std::vector<std::string>{"initial", "protocol", "role", "states", "terminal",
                                           "transitions"});
    for (const auto& t : j["transitions"]) {
      CHECK(t.size() == 6);
      CHECK(t["payloads"].is_array());
      const auto a = t["action"].get<std::string>();
      CHECK((a == "send" || a == "receive" || a == "connect" || a == "disconnect"));
    }
    for (const auto& s : j["states"]) {
      CHECK(s.size() == 2);
    }
  }
  SUBCASE("round trip") {
    auto m = testing::load("battleship.scr");
    for (const auto& r : {"Atk", "Svr", "Def"}) {
      auto e = efsm_of(m, "Game", r);
      CHECK(import_efsm_json(export_efsm_json(e)) == e);
      auto s = split_labels(e);
      CHECK(import_efsm_json(export_efsm_json(s, -1)) == s);
    }
  }
  SUBCASE("malformed input") {
    CHECK_THROWS_AS(import_efsm_json("{"), EfsmFormatError);
    CHECK_THROWS_AS(import_efsm_json("{\"protocol\":\"P\"}"), EfsmFormatError);
  }
}

TEST_CASE("DOT export") {
  auto m = testing::load("battleship.scr");
  auto e = split_labels(efsm_of(m, "BattleShips", "P2"));
  auto dot = export_dot(e);
  CHECK(dot.find("digraph") == 0);
  CHECK(dot.find("label=\"connect GameServer\"") != std::string::npos);
  CHECK(dot.find("label=\"send GameServer: Init(Config)\"") != std::string::npos);
  CHECK(dot.find("label=\"receive GameServer: loser()\"") != std::string::npos);
  CHECK(dot.find("doublecircle") != std::string::npos);
  CHECK(dot.find("shape=point") != std::string::npos);
  std::size_t nodes = 0;
  for (std::size_t i = 0; i < e.state_count(); ++i) {
    if (dot.find("  S" + std::to_string(i) + " [shape=") != std::string::npos) ++nodes;
  }
  CHECK(nodes == e.state_count());
}

TEST_CASE("invariant checker catches broken machines") {
  Efsm e;
  e.protocol = "P";
  e.role = "A";
  e.states = {StateKind::output, StateKind::terminal, StateKind::terminal};
  e.terminal = 1;
  e.transitions = {{0, 1, Action::send, "B", "X", {}}, {0, 1, Action::receive, "C", "X", {}}};
  auto v = check_invariants(e);
  CHECK(v.size() >= 4);
}
