#include "mpst/compose.hpp"

#include <deque>
#include <map>
#include <optional>
#include <unordered_map>

#include "mpst/projector.hpp"

namespace mpst {

std::string_view to_string(ComposedReport::Result r) {
  switch (r) {
    case ComposedReport::Result::ok: return "ok";
    case ComposedReport::Result::deadlock: return "deadlock";
    case ComposedReport::Result::orphan: return "orphan";
    case ComposedReport::Result::unspecified_reception: return "unspecified_reception";
  }
  return "?";
}

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int x : v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Global configuration: one local state per role plus n*n FIFOs of interned
// label ids. Encoded flat for hashing.
struct Global {
  std::vector<int> locals;
  std::vector<std::deque<int>> buffers;  // index sender * n + receiver

  std::vector<int> key() const {
    std::vector<int> k = locals;
    for (const auto& b : buffers) {
      k.push_back(-1 - static_cast<int>(b.size()));
      k.insert(k.end(), b.begin(), b.end());
    }
    return k;
  }
};

class Explorer {
 public:
  Explorer(const std::vector<Efsm>& ms, ComposeOptions opts) : ms_(ms), opts_(opts) {
    for (std::size_t i = 0; i < ms.size(); ++i) index_[ms[i].role] = static_cast<int>(i);
  }

  ComposedReport run() {
    const std::size_t n = ms_.size();
    Global init;
    for (const auto& m : ms_) init.locals.push_back(m.initial);
    init.buffers.resize(n * n);
    add(std::move(init), -1, {});

    for (std::size_t cur = 0; cur < states_.size(); ++cur) {
      bool moved = false;
      std::optional<ComposedReport> defect;
      for (std::size_t i = 0; i < n && !defect; ++i) step_role(cur, i, moved, defect);
      if (defect) {
        defect->explored_states = states_.size();
        return *defect;
      }
      if (moved) continue;

      const Global& g = states_[cur];
      bool all_done = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (!ms_[i].outgoing(g.locals[i]).empty()) all_done = false;
      }
      if (!all_done) {
        ComposedReport r;
        r.result = ComposedReport::Result::deadlock;
        r.trace = trace_to(cur);
        r.message = "no role can act:";
        for (std::size_t i = 0; i < n; ++i) {
          r.message += " " + ms_[i].role + "@S" + std::to_string(g.locals[i]);
        }
        r.explored_states = states_.size();
        return r;
      }
      for (std::size_t b = 0; b < g.buffers.size(); ++b) {
        if (!g.buffers[b].empty()) {
          ComposedReport r;
          r.result = ComposedReport::Result::orphan;
          r.trace = trace_to(cur);
          r.message = ms_[b / n].role + " -> " + ms_[b % n].role + ": " +
                      labels_[static_cast<std::size_t>(g.buffers[b].front())];
          r.explored_states = states_.size();
          return r;
        }
      }
    }
    ComposedReport r;
    r.explored_states = states_.size();
    return r;
  }

 private:
  int intern(const std::string& label) {
    auto it = label_ids_.find(label);
    if (it != label_ids_.end()) return it->second;
    labels_.push_back(label);
    return label_ids_[label] = static_cast<int>(labels_.size() - 1);
  }

  int role_index(const std::string& role) const {
    auto it = index_.find(role);
    return it == index_.end() ? -1 : it->second;
  }

  void add(Global g, int parent, TraceStep step) {
    auto k = g.key();
    if (seen_.count(k)) return;
    if (states_.size() >= opts_.state_cap) {
      throw ExplosionLimit("composition exceeds " + std::to_string(opts_.state_cap) + " states");
    }
    seen_.emplace(std::move(k), states_.size());
    states_.push_back(std::move(g));
    parents_.emplace_back(parent, std::move(step));
  }

  std::vector<TraceStep> trace_to(std::size_t s) const {
    std::vector<TraceStep> out;
    for (auto cur = static_cast<int>(s); parents_[static_cast<std::size_t>(cur)].first >= 0;
         cur = parents_[static_cast<std::size_t>(cur)].first) {
      out.push_back(parents_[static_cast<std::size_t>(cur)].second);
    }
    return {out.rbegin(), out.rend()};
  }

  ComposedReport unspecified(std::size_t cur, const std::string& from, const std::string& to,
                             const std::string& label) const {
    ComposedReport r;
    r.result = ComposedReport::Result::unspecified_reception;
    r.trace = trace_to(cur);
    r.message = to + " cannot receive '" + label + "' from " + from;
    return r;
  }

  // Joint move of a synchronizing pair (connect, disconnect, or a send when
  // buffers are synchronous).
  const Transition* partner(std::size_t j, std::size_t i, const Transition& t,
                            StateId sj) const {
    if (ms_[j].states[static_cast<std::size_t>(sj)] != StateKind::input) return nullptr;
    Action want = t.action == Action::send ? Action::receive : t.action;
    for (const auto* u : ms_[j].outgoing(sj)) {
      if (u->action == want && u->peer == ms_[i].role && u->label == t.label) return u;
    }
    return nullptr;
  }

  void step_role(std::size_t cur, std::size_t i, bool& moved,
                 std::optional<ComposedReport>& defect) {
    const std::size_t n = ms_.size();
    const StateId s = states_[cur].locals[i];
    const Efsm& m = ms_[i];
    const auto outs = m.outgoing(s);
    if (outs.empty()) return;
    const StateKind kind = m.states[static_cast<std::size_t>(s)];

    if (kind == StateKind::output) {
      for (const auto* t : outs) {
        int jj = role_index(t->peer);
        if (jj < 0) continue;
        auto j = static_cast<std::size_t>(jj);
        const bool sync = t->action != Action::send || opts_.buffer_bound == 0;
        if (!sync) {
          if (states_[cur].buffers[i * n + j].size() >= opts_.buffer_bound) continue;
          Global g = states_[cur];
          g.buffers[i * n + j].push_back(intern(t->label));
          g.locals[i] = t->to;
          moved = true;
          add(std::move(g), static_cast<int>(cur), TraceStep{m.role, t->peer, t->label, t->action});
          continue;
        }
        const StateId sj = states_[cur].locals[j];
        const Transition* u = partner(j, i, *t, sj);
        if (!u) {
          // A synchronous send offered to a role that is waiting on us but
          // cannot take this label.
          if (t->action == Action::send && ms_[j].states[static_cast<std::size_t>(sj)] == StateKind::input) {
            auto jo = ms_[j].outgoing(sj);
            if (!jo.empty() && jo.front()->peer == m.role && jo.front()->action == Action::receive) {
              defect = unspecified(cur, m.role, t->peer, t->label);
              return;
            }
          }
          continue;
        }
        Global g = states_[cur];
        g.locals[i] = t->to;
        g.locals[j] = u->to;
        moved = true;
        add(std::move(g), static_cast<int>(cur), TraceStep{m.role, t->peer, t->label, t->action});
      }
      return;
    }

    // Input state: the head of the buffer from the (single) peer decides.
    const Transition* first = outs.front();
    if (first->action != Action::receive || opts_.buffer_bound == 0) return;
    int pp = role_index(first->peer);
    if (pp < 0) return;
    auto p = static_cast<std::size_t>(pp);
    const auto& buf = states_[cur].buffers[p * n + i];
    if (buf.empty()) return;
    const std::string& head = labels_[static_cast<std::size_t>(buf.front())];
    for (const auto* t : outs) {
      if (t->action == Action::receive && t->label == head) {
        Global g = states_[cur];
        g.buffers[p * n + i].pop_front();
        g.locals[i] = t->to;
        moved = true;
        add(std::move(g), static_cast<int>(cur),
            TraceStep{first->peer, m.role, head, Action::receive});
        return;
      }
    }
    defect = unspecified(cur, first->peer, m.role, head);
  }

  const std::vector<Efsm>& ms_;
  ComposeOptions opts_;
  std::map<std::string, int> index_;
  std::vector<std::string> labels_;
  std::map<std::string, int> label_ids_;
  std::vector<Global> states_;
  std::vector<std::pair<int, TraceStep>> parents_;
  std::unordered_map<std::vector<int>, std::size_t, VecHash> seen_;
};

}  // namespace

ComposedReport compose_efsms(const std::vector<Efsm>& machines, ComposeOptions opts) {
  return Explorer(machines, opts).run();
}

ComposedReport compose_check(const ast::ScribbleModule& m, std::string_view protocol,
                             ComposeOptions opts) {
  const auto* p = m.find_protocol(protocol);
  if (!p) {
    throw ProjectError(ProjectError::Kind::unknown_protocol,
                       "protocol '" + std::string(protocol) + "' is not defined", m.span);
  }
  std::vector<Efsm> machines;
  for (const auto& role : p->role_params) {
    machines.push_back(to_efsm(*project(m, protocol, role), p->name, role));
  }
  return compose_efsms(machines, opts);
}

}  // namespace mpst
