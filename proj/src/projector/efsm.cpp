#include "mpst/efsm.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace mpst {

std::string_view to_string(StateKind k) {
  switch (k) {
    case StateKind::output: return "output";
    case StateKind::input: return "input";
    case StateKind::terminal: return "terminal";
  }
  return "?";
}

std::string branch_key(std::string_view label) {
  std::string out(label);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<const Transition*> Efsm::outgoing(StateId s) const {
  std::vector<const Transition*> out;
  for (const auto& t : transitions) {
    if (t.from == s) out.push_back(&t);
  }
  return out;
}

namespace {

class Builder {
 public:
  Builder(std::string protocol, std::string role) {
    e_.protocol = std::move(protocol);
    e_.role = std::move(role);
  }

  Efsm finish(const LocalType& lt) {
    e_.initial = build(lt, std::nullopt);
    return std::move(e_);
  }

 private:
  StateId fresh(StateKind kind) {
    e_.states.push_back(kind);
    return static_cast<StateId>(e_.states.size() - 1);
  }

  StateId claim(std::optional<StateId> into, StateKind kind) {
    if (into) {
      e_.states[static_cast<std::size_t>(*into)] = kind;
      return *into;
    }
    return fresh(kind);
  }

  void edge(StateId from, StateId to, Action a, const std::string& peer, std::string label,
            std::vector<std::string> payloads) {
    e_.transitions.push_back(Transition{from, to, a, peer, std::move(label), std::move(payloads)});
  }

  StateId build(const LocalType& lt, std::optional<StateId> into) {
    return std::visit(
        [&](const auto& n) -> StateId {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, local::End>) {
            if (e_.terminal) return *e_.terminal;
            StateId s = claim(into, StateKind::terminal);
            e_.terminal = s;
            return s;
          } else if constexpr (std::is_same_v<T, local::SendMsg>) {
            StateId s = claim(into, StateKind::output);
            StateId t = build(*n.msg.cont, std::nullopt);
            edge(s, t, Action::send, n.to, n.msg.label, n.msg.payloads);
            return s;
          } else if constexpr (std::is_same_v<T, local::RecvMsg>) {
            StateId s = claim(into, StateKind::input);
            StateId t = build(*n.msg.cont, std::nullopt);
            edge(s, t, Action::receive, n.from, n.msg.label, n.msg.payloads);
            return s;
          } else if constexpr (std::is_same_v<T, local::Select> ||
                               std::is_same_v<T, local::Branch>) {
            constexpr bool sel = std::is_same_v<T, local::Select>;
            StateId s = claim(into, sel ? StateKind::output : StateKind::input);
            for (const auto& b : n.branches) {
              StateId t = build(*b.cont, std::nullopt);
              if constexpr (sel) {
                edge(s, t, Action::send, n.to, b.label, b.payloads);
              } else {
                edge(s, t, Action::receive, n.from, b.label, b.payloads);
              }
            }
            return s;
          } else if constexpr (std::is_same_v<T, local::ConnectTo>) {
            StateId s = claim(into, n.initiator ? StateKind::output : StateKind::input);
            StateId t = build(*n.cont, std::nullopt);
            edge(s, t, Action::connect, n.peer, std::string(kConnectLabel), {});
            return s;
          } else if constexpr (std::is_same_v<T, local::DisconnectFrom>) {
            StateId s = claim(into, n.initiator ? StateKind::output : StateKind::input);
            StateId t = build(*n.cont, std::nullopt);
            edge(s, t, Action::disconnect, n.peer, std::string(kDisconnectLabel), {});
            return s;
          } else if constexpr (std::is_same_v<T, local::RecVar>) {
            return rec_states_.at(n.id);
          } else {
            // The loop head is allocated before its body so back edges can
            // target it; the body's first action then fills it in.
            StateId s = into ? *into : fresh(StateKind::terminal);
            auto saved = rec_states_.find(n.id);
            std::optional<StateId> previous;
            if (saved != rec_states_.end()) previous = saved->second;
            rec_states_[n.id] = s;
            StateId got = build(*n.body, s);
            if (previous) {
              rec_states_[n.id] = *previous;
            } else {
              rec_states_.erase(n.id);
            }
            return got;
          }
        },
        lt.node);
  }

  Efsm e_;
  std::map<int, StateId> rec_states_;
};

bool is_output(Action a, StateKind k) {
  return a == Action::send || ((a == Action::connect || a == Action::disconnect) &&
                               k == StateKind::output);
}

}  // namespace

Efsm to_efsm(const LocalType& lt, std::string protocol, std::string role) {
  return Builder(std::move(protocol), std::move(role)).finish(lt);
}

bool is_label_edge(const Efsm& e, const Transition& t) {
  if (t.action != Action::send && t.action != Action::receive) return false;
  if (!t.payloads.empty() || t.label != branch_key(t.label)) return false;
  if (e.outgoing(t.from).size() < 2) return false;
  int in_degree = 0;
  for (const auto& u : e.transitions) {
    if (u.to == t.to) ++in_degree;
  }
  if (in_degree != 1) return false;
  auto next = e.outgoing(t.to);
  if (next.size() != 1) return false;
  const Transition& u = *next.front();
  return u.action == t.action && u.peer == t.peer && branch_key(u.label) == t.label;
}

Efsm split_labels(const Efsm& e) {
  std::set<StateId> split;
  for (StateId s = 0; s < static_cast<StateId>(e.states.size()); ++s) {
    auto outs = e.outgoing(s);
    if (outs.size() < 2) continue;
    bool already = std::all_of(outs.begin(), outs.end(),
                               [&](const Transition* t) { return is_label_edge(e, *t); });
    if (!already) split.insert(s);
  }
  if (split.empty()) return e;

  Efsm out = e;
  out.transitions.clear();
  for (const auto& t : e.transitions) {
    if (!split.count(t.from)) {
      out.transitions.push_back(t);
      continue;
    }
    out.states.push_back(e.states[static_cast<std::size_t>(t.from)]);
    auto mid = static_cast<StateId>(out.states.size() - 1);
    out.transitions.push_back(Transition{t.from, mid, t.action, t.peer, branch_key(t.label), {}});
    Transition payload = t;
    payload.from = mid;
    out.transitions.push_back(std::move(payload));
  }
  return out;
}

std::vector<std::string> check_invariants(const Efsm& e) {
  std::vector<std::string> out;
  const auto n = static_cast<StateId>(e.states.size());
  auto name = [](StateId s) { return "S" + std::to_string(s); };
  if (n == 0) {
    out.push_back("no states");
    return out;
  }
  if (e.initial < 0 || e.initial >= n) out.push_back("initial state out of range");

  int terminals = 0;
  for (StateId s = 0; s < n; ++s) {
    if (e.states[static_cast<std::size_t>(s)] == StateKind::terminal) ++terminals;
  }
  if (terminals > 1) out.push_back("more than one terminal state");
  if (e.terminal) {
    if (*e.terminal < 0 || *e.terminal >= n ||
        e.states[static_cast<std::size_t>(*e.terminal)] != StateKind::terminal) {
      out.push_back("designated terminal state is not of terminal kind");
    }
  } else if (terminals > 0) {
    out.push_back("terminal-kind state present but no terminal designated");
  }

  for (const auto& t : e.transitions) {
    if (t.from < 0 || t.from >= n || t.to < 0 || t.to >= n) {
      out.push_back("transition endpoint out of range");
      return out;
    }
  }

  for (StateId s = 0; s < n; ++s) {
    const StateKind kind = e.states[static_cast<std::size_t>(s)];
    auto outs = e.outgoing(s);
    if (kind == StateKind::terminal) {
      if (!outs.empty()) out.push_back(name(s) + ": terminal state has outgoing transitions");
      continue;
    }
    if (outs.empty()) {
      out.push_back(name(s) + ": non-terminal state without transitions");
      continue;
    }
    std::set<std::string> labels;
    for (const auto* t : outs) {
      bool output = is_output(t->action, kind);
      if (output != (kind == StateKind::output)) {
        out.push_back(name(s) + ": mixes input and output transitions");
      }
      if (t->peer != outs.front()->peer) out.push_back(name(s) + ": transitions to several peers");
      if (!labels.insert(t->label).second) {
        out.push_back(name(s) + ": label '" + t->label + "' is not deterministic");
      }
    }
  }

  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<StateId> work;
  if (e.initial >= 0 && e.initial < n) {
    work.push_back(e.initial);
    seen[static_cast<std::size_t>(e.initial)] = true;
  }
  while (!work.empty()) {
    StateId s = work.back();
    work.pop_back();
    for (const auto* t : e.outgoing(s)) {
      if (!seen[static_cast<std::size_t>(t->to)]) {
        seen[static_cast<std::size_t>(t->to)] = true;
        work.push_back(t->to);
      }
    }
  }
  for (StateId s = 0; s < n; ++s) {
    if (!seen[static_cast<std::size_t>(s)]) out.push_back(name(s) + ": unreachable");
  }
  return out;
}

}  // namespace mpst
