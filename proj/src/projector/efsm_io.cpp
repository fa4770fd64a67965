#include "mpst/efsm_io.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

namespace mpst {

using ordered_json = nlohmann::ordered_json;

std::string export_efsm_json(const Efsm& e, int indent) {
  ordered_json j;
  j["protocol"] = e.protocol;
  j["role"] = e.role;
  j["initial"] = e.initial;
  j["terminal"] = e.terminal ? ordered_json(*e.terminal) : ordered_json(nullptr);
  j["states"] = ordered_json::array();
  for (std::size_t i = 0; i < e.states.size(); ++i) {
    ordered_json s;
    s["id"] = static_cast<int>(i);
    s["kind"] = std::string(to_string(e.states[i]));
    j["states"].push_back(std::move(s));
  }
  j["transitions"] = ordered_json::array();
  for (const auto& t : e.transitions) {
    ordered_json o;
    o["from"] = t.from;
    o["to"] = t.to;
    o["action"] = std::string(to_string(t.action));
    o["peer"] = t.peer;
    o["label"] = t.label;
    o["payloads"] = t.payloads;
    j["transitions"].push_back(std::move(o));
  }
  return j.dump(indent) + "\n";
}

Efsm import_efsm_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw EfsmFormatError(std::string("invalid JSON: ") + ex.what());
  }
  try {
    Efsm e;
    e.protocol = j.at("protocol").get<std::string>();
    e.role = j.at("role").get<std::string>();
    e.initial = j.at("initial").get<int>();
    if (!j.at("terminal").is_null()) e.terminal = j.at("terminal").get<int>();
    const auto& states = j.at("states");
    e.states.assign(states.size(), StateKind::terminal);
    for (const auto& s : states) {
      int id = s.at("id").get<int>();
      if (id < 0 || static_cast<std::size_t>(id) >= states.size()) {
        throw EfsmFormatError("state id " + std::to_string(id) + " out of range");
      }
      auto kind = s.at("kind").get<std::string>();
      if (kind == "output") {
        e.states[static_cast<std::size_t>(id)] = StateKind::output;
      } else if (kind == "input") {
        e.states[static_cast<std::size_t>(id)] = StateKind::input;
      } else if (kind != "terminal") {
        throw EfsmFormatError("unknown state kind '" + kind + "'");
      }
    }
    for (const auto& o : j.at("transitions")) {
      Transition t;
      t.from = o.at("from").get<int>();
      t.to = o.at("to").get<int>();
      auto action = parse_action(o.at("action").get<std::string>());
      if (!action) throw EfsmFormatError("unknown action");
      t.action = *action;
      t.peer = o.at("peer").get<std::string>();
      t.label = o.at("label").get<std::string>();
      t.payloads = o.at("payloads").get<std::vector<std::string>>();
      e.transitions.push_back(std::move(t));
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw EfsmFormatError(std::string("schema violation: ") + ex.what());
  }
}

std::string describe_transition(const Transition& t) {
  if (t.action == Action::connect || t.action == Action::disconnect) {
    return std::string(to_string(t.action)) + " " + t.peer;
  }
  std::string s = std::string(to_string(t.action)) + " " + t.peer + ": " + t.label + "(";
  for (std::size_t i = 0; i < t.payloads.size(); ++i) {
    if (i) s += ", ";
    s += t.payloads[i];
  }
  return s + ")";
}

namespace {

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string export_dot(const Efsm& e) {
  std::ostringstream os;
  os << "digraph \"" << dot_escape(e.protocol + "@" + e.role) << "\" {\n";
  os << "  rankdir=TB;\n";
  os << "  __start [shape=point];\n";
  for (std::size_t i = 0; i < e.states.size(); ++i) {
    const bool term = e.states[i] == StateKind::terminal;
    os << "  S" << i << " [shape=" << (term ? "doublecircle" : "circle") << "];\n";
  }
  os << "  __start -> S" << e.initial << ";\n";
  for (const auto& t : e.transitions) {
    os << "  S" << t.from << " -> S" << t.to << " [label=\"" << dot_escape(describe_transition(t))
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace mpst
