#include <map>

#include "mpst/codegen.hpp"
#include "mpst/projector.hpp"

namespace mpst::codegen {

namespace {

StateId follow(const Efsm& e, StateId s) {
  auto out = e.outgoing(s);
  if (out.size() != 1) {
    throw CodegenError(CodegenError::Kind::invalid_efsm,
                       "expected a single transition out of state " + std::to_string(s));
  }
  return out.front()->to;
}

StateId first_choice(const Efsm& e, StateId s) {
  for (std::size_t guard = 0; guard <= e.state_count(); ++guard) {
    if (e.outgoing(s).size() > 1) return s;
    s = follow(e, s);
  }
  throw CodegenError(CodegenError::Kind::invalid_efsm, "no choice state in " + e.role);
}

StateId after_label(const Efsm& e, StateId s, std::string_view key) {
  for (const auto* t : e.outgoing(s)) {
    if (t->label == key) return follow(e, t->to);
  }
  throw CodegenError(CodegenError::Kind::invalid_efsm,
                     "state " + std::to_string(s) + " has no '" + std::string(key) + "' branch");
}

Efsm split_efsm(const ast::ScribbleModule& m, const std::string& role) {
  return split_labels(to_efsm(*project(m, "BattleShips", role), "BattleShips", role));
}

std::map<std::string, std::string> placeholders(const ast::ScribbleModule& m) {
  const Efsm p2 = split_efsm(m, "P2");
  const Efsm srv = split_efsm(m, "GameServer");
  const StateId init = follow(p2, p2.initial);
  const StateId defend = first_choice(p2, p2.initial);
  const StateId attack = after_label(p2, defend, "miss");
  const StateId attack_branch = follow(p2, attack);
  if (!p2.terminal) throw CodegenError(CodegenError::Kind::invalid_efsm, "P2 has no terminal state");
  return {
      {"{{INIT}}", state_type_name(init)},
      {"{{DEFEND}}", state_type_name(defend)},
      {"{{ATTACK}}", state_type_name(attack)},
      {"{{ATTACK_BRANCH}}", state_type_name(attack_branch)},
      {"{{END}}", state_type_name(*p2.terminal)},
      {"{{SELECT}}", state_type_name(first_choice(srv, srv.initial))},
  };
}

std::string fill(std::string text, const std::map<std::string, std::string>& vars) {
  for (const auto& [k, v] : vars) {
    for (auto at = text.find(k); at != std::string::npos; at = text.find(k, at + v.size())) {
      text.replace(at, k.size(), v);
    }
  }
  return text;
}

constexpr const char* kPrelude = R"(#include "Game/BattleShips_GameServer.hpp"
#include "Game/BattleShips_P2.hpp"

namespace api = Game::BattleShips_P2;
namespace srv = Game::BattleShips_GameServer;
namespace msg = Game::messages;
using namespace mpst::rt;

Session<api::{{ATTACK}}, api::{{END}}, Unit> attack();
)";

constexpr const char* kDefend = R"(
Session<api::{{DEFEND}}, api::{{END}}, Unit> defend() {
  return choice(api::{{DEFEND}}_branches{
      .hit = receive() >>= [](msg::Hit_Location) { return defer(defend); },
      .miss = receive() >>= [](msg::Miss_Location) { return defer(attack); },
      .loser = receive() >>= [](msg::Loser) { return done(); },
  });
}
)";

constexpr const char* kAttack = R"(
Session<api::{{ATTACK}}, api::{{END}}, Unit> attack() {
  return send(msg::Attack_Location{{0, 0}}) >> choice(api::{{ATTACK_BRANCH}}_branches{
      .hit = receive() >>= [](msg::Hit) { return defer(attack); },
      .miss = receive() >>= [](msg::Miss) { return defer(defend); },
      .sunk = receive() >>= [](msg::Sunk) { return defer(attack); },
      .winner = receive() >>= [](msg::Winner) { return done(); },
  });
}
)";

std::string program(const std::map<std::string, std::string>& vars, const std::string& defend,
                    const std::string& main_body) {
  return fill(std::string(kPrelude) + defend + kAttack + "\nint main() {\n" + main_body + "}\n",
              vars);
}

}  // namespace

ImportMap compile_fail_import_map() {
  return ImportMap{{{"Location", "std::array<int, 2>"}, {"Config", "std::vector<std::array<int, 2>>"}},
                   {"<array>", "<vector>"}};
}

std::string positive_control_program(const ast::ScribbleModule& battleship) {
  return program(placeholders(battleship), kDefend,
                 "  auto game = connect<api::GameServer>(\"mem:game\") >> send(msg::Init_Config{}) >> "
                 "defer(defend);\n"
                 "  run_session<api::P2>(SessionOptions{}, game);\n");
}

std::vector<CompileFailCase> compile_fail_corpus(const ast::ScribbleModule& battleship) {
  const auto vars = placeholders(battleship);
  const std::string run = "  run_session<api::P2>(SessionOptions{}, game);\n";
  std::vector<CompileFailCase> out;
  out.push_back({"skipped_send",
                 program(vars, kDefend,
                         "  auto game = connect<api::GameServer>(\"mem:game\") >> receive() >> "
                         "defer(defend);\n" + run),
                 "mpst: no receive is possible in this state"});
  out.push_back({"wrong_payload",
                 program(vars, kDefend,
                         "  auto game = connect<api::GameServer>(\"mem:game\") >> "
                         "send(msg::Attack_Location{{1, 1}}) >> defer(defend);\n" + run),
                 "mpst: payload type does not match the send capability"});
  out.push_back({"undefined_label",
                 program(vars, kDefend,
                         "  auto judged = send(msg::Loser{}).at<srv::{{SELECT}}>();\n"
                         "  (void)judged;\n"),
                 "mpst: label is not offered by this selection"});
  out.push_back({"step_used_twice",
                 program(vars, kDefend,
                         "  Session<api::{{INIT}}, api::{{DEFEND}}, Unit> init = send(msg::Init_Config{});\n"
                         "  auto game = connect<api::GameServer>(\"mem:game\") >> init >> init >> "
                         "defer(defend);\n" + run),
                 "mpst: session starts in a different state"});
  out.push_back({"not_driven_to_terminal",
                 program(vars, kDefend,
                         "  auto game = connect<api::GameServer>(\"mem:game\") >> "
                         "send(msg::Init_Config{});\n" + run),
                 "mpst: session does not end in the terminal state"});
  out.push_back({"connect_twice",
                 program(vars, kDefend,
                         "  auto game = connect<api::GameServer>(\"mem:game\") >> "
                         "connect<api::GameServer>(\"mem:game\") >> send(msg::Init_Config{}) >> "
                         "defer(defend);\n" + run),
                 "mpst: no connect is possible in this state"});
  out.push_back({"missing_branch_handler",
                 program(vars, R"(
Session<api::{{DEFEND}}, api::{{END}}, Unit> defend() {
  return choice(api::{{DEFEND}}_branches{
      .hit = receive() >>= [](msg::Hit_Location) { return defer(defend); },
      .loser = receive() >>= [](msg::Loser) { return done(); },
  });
}
)",
                         "  auto game = connect<api::GameServer>(\"mem:game\") >> "
                         "send(msg::Init_Config{}) >> defer(defend);\n" + run),
                 "class template argument deduction failed|no matching function for call to "
                 "'S[0-9]+_branches"});
  out.push_back({"foreign_handler_record",
                 program(vars, R"(
Session<api::{{DEFEND}}, api::{{END}}, Unit> defend() {
  return choice(api::{{ATTACK_BRANCH}}_branches{
      .hit = receive() >>= [](msg::Hit) { return defer(attack); },
      .miss = receive() >>= [](msg::Miss) { return defer(defend); },
      .sunk = receive() >>= [](msg::Sunk) { return defer(attack); },
      .winner = receive() >>= [](msg::Winner) { return done(); },
  });
}
)",
                         "  auto game = connect<api::GameServer>(\"mem:game\") >> "
                         "send(msg::Init_Config{}) >> defer(defend);\n" + run),
                 "mpst: handler record does not belong to this branch state"});
  return out;
}

}  // namespace mpst::codegen
