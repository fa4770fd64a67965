#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <unistd.h>

#include "mpst/codegen.hpp"
#include "mpst/efsm_io.hpp"
#include "mpst/parser.hpp"
#include "mpst/projector.hpp"
#include "support/corpus.hpp"
#include "support/efsm_iso.hpp"

using namespace mpst;
using namespace mpst::codegen;

namespace {

Efsm split_of(const ast::ScribbleModule& m, const std::string& p, const std::string& r) {
  return split_labels(to_efsm(*project(m, p, r), p, r));
}

std::string qualified(const std::string& ns, StateId s) {
  return "::" + ns + "::" + state_type_name(s);
}

// Expected capability heads written out from the EFSM: one per non-terminal
// state, in the shape Kind<peer, successor[, message]>.
std::vector<std::string> expected_heads(const Efsm& e, const std::string& module) {
  const std::string ns = api_namespace(module, e.protocol, e.role);
  const std::string msgs = "::" + messages_namespace(module) + "::";
  std::vector<std::string> out;
  for (StateId s = 0; s < static_cast<StateId>(e.state_count()); ++s) {
    auto edges = e.outgoing(s);
    if (edges.empty()) continue;
    const auto& t = *edges.front();
    const std::string head = "struct Capability<" + qualified(ns, s) + "> : ";
    const std::string peer = "::" + ns + "::" + t.peer;
    if (edges.size() > 1) {
      std::string table;
      for (const auto* x : edges) {
        if (!table.empty()) table += ", ";
        table += "Entry<\"" + x->label + "\", " + qualified(ns, x->to) + ">";
      }
      const std::string kind = t.action == Action::send ? "Select" : "Branch";
      out.push_back(head + kind + "<" + peer + ", Table<" + table + ">>");
    } else if (t.action == Action::connect || t.action == Action::disconnect) {
      const bool active = e.states[static_cast<std::size_t>(s)] == StateKind::output;
      const std::string kind = t.action == Action::connect ? (active ? "Connect" : "Accept")
                                                           : (active ? "Disconnect" : "AwaitDisconnect");
      out.push_back(head + kind + "<" + peer + ", " + qualified(ns, t.to) + ">");
    } else {
      std::string name = t.label;
      for (const auto& p : t.payloads) name += "_" + p;
      const std::string kind = t.action == Action::send ? "Send" : "Receive";
      out.push_back(head + kind + "<" + peer + ", " + qualified(ns, t.to) + ", " + msgs + name +
                    ">");
    }
  }
  return out;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
  return n;
}

std::string api_text(const Efsm& e, const std::string& module) {
  auto a = generate_api(e, {module});
  return a.files.at(api_path(module, e.protocol, e.role));
}

}  // namespace

TEST_CASE("generation is deterministic for every corpus protocol") {
  for (const auto& file : testing::valid_corpus()) {
    auto m = testing::load(file);
    for (const auto& p : m.protocols) {
      CAPTURE(file);
      CAPTURE(p.name);
      auto a = generate_protocol(m, p.name, {});
      auto b = generate_protocol(testing::load(file), p.name, {});
      CHECK(a == b);
      CHECK(a.files.size() == p.role_params.size() + 1);
    }
  }
}

TEST_CASE("terminal-only machine") {
  Efsm e{"Nop", "A", {StateKind::terminal}, 0, 0, {}};
  auto a = generate_api(e, {"M"});
  REQUIRE(a.files.size() == 1);
  const auto& text = a.files.at("M/Nop_A.hpp");
  CHECK(a.entry_names.states == std::vector<std::string>{"S0"});
  CHECK(a.entry_names.roles == std::vector<std::string>{"A"});
  CHECK(count(text, "struct S") == 1);
  CHECK(text.find("struct Initial<::M::Nop_A::A> {\n  using state = ::M::Nop_A::S0;") !=
        std::string::npos);
  CHECK(text.find("struct Terminal<::M::Nop_A::A> {\n  using state = ::M::Nop_A::S0;") !=
        std::string::npos);
  CHECK(count(text, "struct Capability<") == 0);
}

TEST_CASE("BattleShips P2 fragment") {
  auto m = testing::load("battleship.scr");
  auto e = split_of(m, "BattleShips", "P2");
  const std::string text = api_text(e, "Game");
  const std::string ns = "::Game::BattleShips_P2::";

  auto first = e.outgoing(e.initial);
  REQUIRE(first.size() == 1);
  const StateId connected = first[0]->to;
  REQUIRE(e.outgoing(connected).size() == 1);
  const StateId branch = e.outgoing(connected)[0]->to;
  std::set<std::string> keys;
  for (const auto* t : e.outgoing(branch)) keys.insert(t->label);
  CHECK(keys == std::set<std::string>{"loser", "miss", "hit"});

  CHECK(text.find("struct Capability<" + ns + "S0> : Connect<" + ns + "GameServer, " + ns +
                  state_type_name(connected) + ">") != std::string::npos);
  CHECK(text.find("struct Capability<" + ns + state_type_name(connected) + "> : Send<" + ns +
                  "GameServer, " + ns + state_type_name(branch) + ", ::Game::messages::Init_Config>") !=
        std::string::npos);
  CHECK(text.find("struct Capability<" + ns + state_type_name(branch) + "> : Branch<" + ns +
                  "GameServer, Table<") != std::string::npos);
  CHECK(text.find("static constexpr std::string_view name = \"GameServer\";") != std::string::npos);
  CHECK(text.find("static constexpr std::string_view name = \"P2\";") != std::string::npos);
}

TEST_CASE("capabilities match the machine for every corpus role") {
  for (const auto& file : testing::valid_corpus()) {
    auto m = testing::load(file);
    for (const auto& p : m.protocols) {
      for (const auto& r : p.role_params) {
        CAPTURE(file);
        CAPTURE(p.name);
        CAPTURE(r);
        auto e = split_of(m, p.name, r);
        const std::string text = api_text(e, m.name);
        const auto heads = expected_heads(e, m.name);
        for (const auto& h : heads) {
          CAPTURE(h);
          CHECK(count(text, h) == 1);
        }
        CHECK(count(text, "struct Capability<") == heads.size());
        // One declaration per state.
        for (StateId s = 0; s < static_cast<StateId>(e.state_count()); ++s) {
          const std::string decl =
              "struct Capability<" + qualified(api_namespace(m.name, p.name, r), s) + ">";
          CHECK(count(text, decl) <= 1);
        }
        CHECK(count(text, "struct Initial<") == 1);
        CHECK(count(text, "struct Terminal<") == (e.terminal ? 1u : 0u));
      }
    }
  }
}

TEST_CASE("Game attacker API") {
  auto m = testing::load("battleship.scr");
  auto e = split_of(m, "Game", "Atk");
  const std::string text = api_text(e, "Game");
  const std::string ns = "::Game::Game_Atk::";
  const StateId s1 = e.outgoing(e.initial).at(0)->to;
  CHECK(text.find("struct Capability<" + ns + "S0> : Send<" + ns + "Svr, " + ns +
                  state_type_name(s1) + ", ::Game::messages::Attack_Location>") !=
        std::string::npos);
  std::vector<std::string> keys;
  for (const auto* t : e.outgoing(s1)) keys.push_back(t->label);
  CHECK(keys == std::vector<std::string>{"hit", "miss", "sunk", "winner"});
  CHECK(text.find("struct " + branch_record_name(s1) + " {\n  T0 hit;\n  T1 miss;\n  T2 sunk;\n  T3 winner;") !=
        std::string::npos);
}

TEST_CASE("message records") {
  auto m = testing::load("battleship.scr");
  auto a = generate_message_types(m);
  const auto& text = a.files.at("Game/messages.hpp");
  CHECK(text.find("struct Hit {\n  static constexpr std::string_view label = \"Hit\";") !=
        std::string::npos);
  CHECK(text.find("mpst::rt::expect_arity(m, 0);\n    return Hit{};") != std::string::npos);
  CHECK(text.find("struct Init_Config {") != std::string::npos);
  CHECK(text.find("  types::Config config{};") != std::string::npos);
  CHECK(text.find("struct Attack_Location {") != std::string::npos);
  CHECK(text.find("  types::Location location{};") != std::string::npos);
  CHECK(text.find("using Location = ::Game::BattleShips::Location;") != std::string::npos);
  std::set<std::string> names(a.entry_names.messages.begin(), a.entry_names.messages.end());
  CHECK(names == std::set<std::string>{"Attack_Location", "Hit", "Hit_Location", "Init_Config",
                                       "Loser", "Miss", "Miss_Location", "Sunk", "Winner"});
}

TEST_CASE("import map") {
  auto m = testing::load("battleship.scr");
  auto map = parse_import_map(
      R"({"aliases":{"Location":"my::Loc","Config":"my::Cfg"},"includes":["\"my/types.hpp\""]})");
  auto a = generate_message_types(m, map);
  const auto& text = a.files.at("Game/messages.hpp");
  CHECK(text.find("#include \"my/types.hpp\"") != std::string::npos);
  CHECK(text.find("using Location = my::Loc;") != std::string::npos);

  map.aliases.erase("Config");
  try {
    generate_message_types(m, map);
    FAIL("expected UnknownAlias");
  } catch (const CodegenError& e) {
    CHECK(e.kind() == CodegenError::Kind::unknown_alias);
    CHECK(std::string(e.what()).find("Config") != std::string::npos);
  }
  for (const char* bad : {"[]", "{\"aliases\":[]}", "{\"aliases\":{\"A\":1}}", "nope",
                          "{\"aliases\":{},\"includes\":\"x\"}"}) {
    CAPTURE(bad);
    try {
      parse_import_map(bad);
      FAIL("expected bad_import_map");
    } catch (const CodegenError& e) {
      CHECK(e.kind() == CodegenError::Kind::bad_import_map);
    }
  }
}

TEST_CASE("generator rejects machines it cannot express") {
  SUBCASE("unsplit branch") {
    auto m = testing::load("battleship.scr");
    auto e = to_efsm(*project(m, "Game", "Atk"), "Game", "Atk");
    try {
      generate_api(e, {"Game"});
      FAIL("expected not_split");
    } catch (const CodegenError& err) {
      CHECK(err.kind() == CodegenError::Kind::not_split);
    }
  }
  SUBCASE("nondeterministic machine") {
    Efsm e{"P", "A", {StateKind::output, StateKind::terminal, StateKind::terminal}, 0, 1, {}};
    e.transitions = {{0, 1, Action::send, "B", "x", {}}, {0, 2, Action::send, "B", "x", {}}};
    CHECK_THROWS_AS(generate_api(e, {"M"}), CodegenError);
  }
  SUBCASE("role named like a state") {
    Efsm e{"P", "A", {StateKind::output, StateKind::terminal}, 0, 1, {}};
    e.transitions = {{0, 1, Action::send, "S1", "Go", {}}};
    try {
      generate_api(e, {"M"});
      FAIL("expected name_collision");
    } catch (const CodegenError& err) {
      CHECK(err.kind() == CodegenError::Kind::name_collision);
    }
  }
}

TEST_CASE("naming helpers") {
  CHECK(message_type_name("Hit", {}) == "Hit");
  CHECK(message_type_name("Hit", {"Location"}) == "Hit_Location");
  CHECK(handler_field_name("Hit") == "hit");
  CHECK(handler_field_name("Delete") == "delete_");
  CHECK(messages_namespace("Net.Fetch") == "Net::Fetch::messages");
  CHECK(api_namespace("Net.Fetch", "Fetch", "C") == "Net::Fetch::Fetch_C");
  CHECK(api_path("Net.Fetch", "Fetch", "C") == "Net.Fetch/Fetch_C.hpp");
  CHECK(messages_path("Game") == "Game/messages.hpp");
}

TEST_CASE("projection of BattleShips for P2 is isomorphic to the golden machine") {
  auto m = testing::load("battleship.scr");
  auto e = split_of(m, "BattleShips", "P2");
  auto golden = import_efsm_json(testing::read_file(MPST_GOLDEN_DIR "/battleships_p2.json"));
  CHECK(testing::isomorphism_mismatch(golden, e) == "");
  // A single relabelled edge must be caught.
  auto broken = golden;
  for (auto& t : broken.transitions) {
    if (t.label == "loser") t.label = "lost";
  }
  CHECK(testing::isomorphism_mismatch(broken, e) != "");
}

TEST_CASE("mpst generate writes the same files twice") {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / ("mpst-gen-" + std::to_string(::getpid()));
  fs::remove_all(base);
  auto gen = [&](const std::string& dir) {
    const std::string cmd = std::string(MPST_TOOL) + " generate " +
                            (testing::corpus_dir() / "battleship.scr").string() +
                            " --protocol BattleShips -o " + (base / dir).string() + " > " +
                            (base / (dir + ".out")).string();
    fs::create_directories(base);
    return std::system(cmd.c_str());
  };
  REQUIRE(gen("one") == 0);
  REQUIRE(gen("two") == 0);
  std::vector<std::string> files;
  for (const auto& f : fs::recursive_directory_iterator(base / "one")) {
    if (f.is_regular_file()) files.push_back(fs::relative(f.path(), base / "one").string());
  }
  std::sort(files.begin(), files.end());
  CHECK(files == std::vector<std::string>{"Game/BattleShips_GameServer.hpp", "Game/BattleShips_P1.hpp",
                                          "Game/BattleShips_P2.hpp", "Game/messages.hpp"});
  for (const auto& f : files) {
    CHECK(testing::read_file(base / "one" / f) == testing::read_file(base / "two" / f));
  }
  CHECK(gen("bad") == 0);
  const std::string bad_map = (base / "bad.json").string();
  {
    std::ofstream(bad_map) << R"({"aliases":{"Location":"int"}})";
  }
  const std::string cmd = std::string(MPST_TOOL) + " generate " +
                          (testing::corpus_dir() / "battleship.scr").string() +
                          " --protocol BattleShips --import-map " + bad_map + " -o " +
                          (base / "x").string() + " 2> " + (base / "err.txt").string();
  CHECK(std::system(cmd.c_str()) != 0);
  CHECK(testing::read_file(base / "err.txt").rfind("error[UnknownAlias]", 0) == 0);
  fs::remove_all(base);
}
