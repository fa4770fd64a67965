#include <doctest.h>

#include <random>

#include "mpst/parser.hpp"
#include "support/corpus.hpp"
#include "support/random_ast.hpp"

using namespace mpst;
using namespace mpst::ast;

namespace {

void check_spans(const Block& b, std::size_t len) {
  for (const auto& s : b) {
    const auto& sp = s.span();
    CHECK(sp.begin <= sp.end);
    CHECK(sp.end <= len);
    if (const auto* c = std::get_if<Choice>(&s.node)) {
      for (const auto& br : c->branches) check_spans(br, len);
    }
  }
}

void check_spans(const ScribbleModule& m, std::size_t len) {
  CHECK(m.span.end <= len);
  for (const auto& t : m.type_decls) CHECK(t.span.end <= len);
  for (const auto& p : m.protocols) {
    CHECK(p.span.begin <= p.span.end);
    CHECK(p.span.end <= len);
    check_spans(p.body, len);
  }
}

}  // namespace

TEST_CASE("single transfer parses into the expected tree") {
  auto m = parse_module(
      "module Game; global protocol P(role A, role B) { Attack(Location) from A to B; }");
  ScribbleModule want;
  want.name = "Game";
  GlobalProtocolDecl p;
  p.name = "P";
  p.role_params = {"A", "B"};
  p.body.push_back(Statement{Transfer{"Attack", {"Location"}, "A", "B", {}}});
  want.protocols.push_back(p);
  CHECK(m == want);
  CHECK(parse_module(render_module(m)) == m);
}

TEST_CASE("empty input lacks a module header") {
  CHECK_THROWS_AS(parse_module(""), ParseError);
  try {
    parse_module("");
  } catch (const ParseError& e) {
    CHECK(e.expected().count("'module'") == 1);
    CHECK(e.span().begin == 0);
  }
}

TEST_CASE("battleship source") {
  auto m = testing::load("battleship.scr");
  CHECK(m.name == "Game");
  const auto* game = m.find_protocol("Game");
  REQUIRE(game);
  CHECK(game->role_params == std::vector<std::string>{"Atk", "Svr", "Def"});
  REQUIRE(game->body.size() == 2);
  const auto* c = std::get_if<Choice>(&game->body[1].node);
  REQUIRE(c);
  CHECK(c->at == "Svr");
  CHECK(c->branches.size() == 3);
  const auto* bs = m.find_protocol("BattleShips");
  REQUIRE(bs);
  CHECK(std::holds_alternative<Connect>(bs->body[0].node));
  CHECK(m.find_type("Location")->target_path == "Game.BattleShips.Location");
}

TEST_CASE("rendering") {
  SUBCASE("header only") {
    ScribbleModule m;
    m.name = "A.B";
    CHECK(render_module(m) == "module A.B;\n");
  }
  SUBCASE("transfer statement") {
    Block b{Statement{Transfer{"Attack", {"Location"}, "Atk", "Svr", {}}}};
    CHECK(render_block(b, 0) == "Attack(Location) from Atk to Svr;\n");
  }
  SUBCASE("disconnect and connect") {
    Block b{Statement{Connect{"A", "B", {}}}, Statement{Disconnect{"A", "B", {}}}};
    CHECK(render_block(b, 0) == "connect A to B;\ndisconnect A and B;\n");
  }
}

TEST_CASE("corpus round-trips through the printer") {
  for (const auto& f : testing::valid_corpus()) {
    CAPTURE(f);
    auto text = testing::read_file(testing::corpus_dir() / f);
    auto m = parse_module(text);
    check_spans(m, text.size());
    auto again = parse_module(render_module(m));
    CHECK(again == m);
    CHECK(render_module(again) == render_module(m));
  }
}

TEST_CASE("random trees round-trip") {
  testing::AstGenerator gen(20240611);
  for (int i = 0; i < 500; ++i) {
    auto m = gen.module();
    auto text = render_module(m);
    CAPTURE(text);
    auto parsed = parse_module(text);
    REQUIRE(parsed == m);
    check_spans(parsed, text.size());
  }
}

TEST_CASE("comments and whitespace are ignored") {
  auto a = parse_module("module M; global protocol P(role A, role B) { X() from A to B; }");
  auto b = parse_module(
      "// lead\nmodule M; // tail\n\nglobal protocol P(\n role A, // a\n role B) {\n"
      "  X() from A to B; // x\n}\n");
  CHECK(a == b);
}

TEST_CASE("error positions and expectations") {
  SUBCASE("missing semicolon") {
    try {
      parse_module("module M;\nglobal protocol P(role A, role B) {\n  X() from A to B\n}");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.span().line == 3);
      CHECK(e.expected().count("';'") == 1);
    }
  }
  SUBCASE("keyword used as a role") {
    CHECK_THROWS_AS(parse_module("module M; global protocol P(role do, role B) {}"), ParseError);
  }
  SUBCASE("unterminated string") {
    CHECK_THROWS_AS(parse_module("module M; type T as \"abc"), ParseError);
  }
  SUBCASE("deep nesting is bounded") {
    std::string s = "module M; global protocol P(role A, role B) {";
    for (int i = 0; i < 1000; ++i) s += "choice at A {";
    CHECK_THROWS_AS(parse_module(s), ParseError);
  }
}

TEST_CASE("parser is total on random bytes") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> len(0, 120);
  std::uniform_int_distribution<int> byte(0, 255);
  int parsed = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string s(static_cast<std::size_t>(len(rng)), '\0');
    for (auto& c : s) c = static_cast<char>(byte(rng));
    try {
      auto m = parse_module(s);
      check_spans(m, s.size());
      ++parsed;
    } catch (const ParseError& e) {
      CHECK(e.span().end <= s.size());
    }
  }
  CHECK(parsed >= 0);
}

TEST_CASE("parser is total on mutated corpus text") {
  auto base = testing::read_file(testing::corpus_dir() / "battleship.scr");
  std::mt19937 rng(11);
  const std::string alphabet = "{}();,.\" \n/abcAtoromdchiceglbypsr_0";
  for (int i = 0; i < 10000; ++i) {
    std::string s = base;
    const int edits = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edits; ++e) {
      std::size_t at = rng() % (s.size() + 1);
      switch (rng() % 3) {
        case 0:
          if (at < s.size()) s.erase(at, 1 + rng() % 8);
          break;
        case 1: s.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
        default:
          if (at < s.size()) s[at] = alphabet[rng() % alphabet.size()];
      }
    }
    try {
      auto m = parse_module(s);
      check_spans(m, s.size());
      CHECK(parse_module(render_module(m)) == m);
    } catch (const ParseError& e) {
      CHECK(e.span().end <= s.size());
    }
  }
}
