#pragma once

#include <map>
#include <queue>
#include <string>
#include <tuple>

#include "mpst/efsm.hpp"

namespace mpst::testing {

/// Rooted isomorphism of two deterministic machines: walks both from their
/// initial states pairing successors by (action, peer, label, payloads).
/// Returns an empty string on success, otherwise the first mismatch.
inline std::string isomorphism_mismatch(const Efsm& a, const Efsm& b) {
  using Key = std::tuple<Action, std::string, std::string, std::vector<std::string>>;
  auto edges = [](const Efsm& e, StateId s) {
    std::map<Key, StateId> out;
    for (const auto& t : e.transitions) {
      if (t.from == s) out[{t.action, t.peer, t.label, t.payloads}] = t.to;
    }
    return out;
  };
  if (a.states.size() != b.states.size()) return "state counts differ";
  if (a.transitions.size() != b.transitions.size()) return "transition counts differ";
  if (a.terminal.has_value() != b.terminal.has_value()) return "only one has a terminal state";
  std::map<StateId, StateId> fwd, back;
  std::queue<std::pair<StateId, StateId>> todo;
  fwd[a.initial] = b.initial;
  back[b.initial] = a.initial;
  todo.push({a.initial, b.initial});
  while (!todo.empty()) {
    auto [x, y] = todo.front();
    todo.pop();
    const std::string where = "S" + std::to_string(x) + "/S" + std::to_string(y);
    if (a.states[static_cast<std::size_t>(x)] != b.states[static_cast<std::size_t>(y)]) {
      return "state kinds differ at " + where;
    }
    if ((a.terminal == x) != (b.terminal == y)) return "terminal differs at " + where;
    auto ex = edges(a, x);
    auto ey = edges(b, y);
    if (ex.size() != ey.size()) return "edge counts differ at " + where;
    for (const auto& [k, tx] : ex) {
      auto it = ey.find(k);
      if (it == ey.end()) return "edge '" + std::get<2>(k) + "' missing at " + where;
      const StateId ty = it->second;
      auto f = fwd.find(tx);
      auto r = back.find(ty);
      if (f == fwd.end() && r == back.end()) {
        fwd[tx] = ty;
        back[ty] = tx;
        todo.push({tx, ty});
      } else if (f == fwd.end() || r == back.end() || f->second != ty || r->second != tx) {
        return "edge '" + std::get<2>(k) + "' leads to different states at " + where;
      }
    }
  }
  if (fwd.size() != a.states.size()) return "unreachable states";
  return {};
}

}  // namespace mpst::testing
