#include <algorithm>
#include <cctype>

#include "mpst/projector.hpp"

namespace mpst {

const char* to_string(ProjectError::Kind kind) {
  switch (kind) {
    case ProjectError::Kind::unknown_protocol: return "UnknownProtocol";
    case ProjectError::Kind::unknown_role: return "UnknownRole";
    case ProjectError::Kind::unmergeable: return "Unmergeable";
    case ProjectError::Kind::unbounded_rec: return "UnboundedRec";
    case ProjectError::Kind::non_tail_recursion: return "NonTailRecursion";
  }
  return "ProjectError";
}

namespace {

using Kind = ProjectError::Kind;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Binds each formal role of the protocol being projected to a role of the
// top-level protocol.
struct Binding {
  std::vector<std::string> formals;
  std::vector<std::string> concrete;

  const std::string* find(std::string_view formal) const {
    for (std::size_t i = 0; i < formals.size(); ++i) {
      if (formals[i] == formal) return &concrete[i];
    }
    return nullptr;
  }
};

struct Frame {
  std::string protocol;
  std::vector<std::string> concrete;
  LocalTypePtr cont;
  int id = 0;
  bool used = false;
};

struct RecKey {
  std::string protocol;
  std::vector<std::string> concrete;
  LocalTypePtr cont;
};

std::size_t factorial_capped(std::size_t n) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    f *= i;
    if (f > 1'000'000) return 1'000'000;
  }
  return f;
}

class Projector {
 public:
  Projector(const ast::ScribbleModule& m, std::string target) : m_(m), target_(std::move(target)) {
    std::size_t max_roles = 0;
    for (const auto& p : m.protocols) max_roles = std::max(max_roles, p.role_params.size());
    max_depth_ = std::max<std::size_t>(1, m.protocols.size()) * factorial_capped(max_roles);
  }

  LocalTypePtr run(const ast::GlobalProtocolDecl& p) {
    Binding b{p.role_params, p.role_params};
    return call(p, std::move(b), make_end(), p.span);
  }

 private:
  const std::string& resolve(const Binding& b, const std::string& formal,
                             const ast::SourceSpan& span) const {
    const std::string* r = b.find(formal);
    if (!r) throw ProjectError(Kind::unknown_role, "role '" + formal + "' is not declared", span);
    return *r;
  }

  int rec_id(const std::string& protocol, const std::vector<std::string>& concrete,
             const LocalTypePtr& cont) {
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      if (keys_[i].protocol == protocol && keys_[i].concrete == concrete &&
          same(keys_[i].cont, cont)) {
        return static_cast<int>(i);
      }
    }
    keys_.push_back(RecKey{protocol, concrete, cont});
    return static_cast<int>(keys_.size() - 1);
  }

  LocalTypePtr call(const ast::GlobalProtocolDecl& q, Binding b, LocalTypePtr cont,
                    const ast::SourceSpan& span) {
    for (auto& f : stack_) {
      if (f.protocol == q.name && f.concrete == b.concrete) {
        if (!same(f.cont, cont)) {
          throw ProjectError(Kind::non_tail_recursion,
                             "recursive call to '" + q.name + "' is not in tail position", span);
        }
        f.used = true;
        return make_local(local::RecVar{f.id});
      }
    }
    if (stack_.size() >= max_depth_) {
      throw ProjectError(Kind::unbounded_rec,
                         "recursion through '" + q.name + "' does not close over a finite set of "
                         "role bindings", span);
    }
    int id = rec_id(q.name, b.concrete, cont);
    stack_.push_back(Frame{q.name, b.concrete, cont, id, false});
    LocalTypePtr body = seq(b, q.body, cont);
    bool used = stack_.back().used;
    stack_.pop_back();
    if (!used) return body;
    if (const auto* v = std::get_if<local::RecVar>(&body->node); v && v->id == id) {
      // The loop never involves the role again and has no exit.
      return make_end();
    }
    std::string name = q.name + "(";
    for (std::size_t i = 0; i < q.role_params.size(); ++i) {
      if (i) name += ", ";
      name += q.role_params[i] + "=" + b.concrete[i];
    }
    name += ")";
    return make_local(local::Rec{id, std::move(name), std::move(body)});
  }

  LocalTypePtr seq(const Binding& b, const ast::Block& block, LocalTypePtr cont) {
    LocalTypePtr acc = std::move(cont);
    for (auto it = block.rbegin(); it != block.rend(); ++it) acc = stmt(b, *it, std::move(acc));
    return acc;
  }

  LocalTypePtr stmt(const Binding& b, const ast::Statement& s, LocalTypePtr cont) {
    return std::visit(
        [&](const auto& n) -> LocalTypePtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ast::Transfer>) {
            const auto& from = resolve(b, n.from, n.span);
            const auto& to = resolve(b, n.to, n.span);
            LocalMessage msg{n.label, n.payloads, cont};
            if (from == target_) return make_local(local::SendMsg{to, std::move(msg)});
            if (to == target_) return make_local(local::RecvMsg{from, std::move(msg)});
            return cont;
          } else if constexpr (std::is_same_v<T, ast::Connect>) {
            const auto& from = resolve(b, n.from, n.span);
            const auto& to = resolve(b, n.to, n.span);
            if (from == target_) return make_local(local::ConnectTo{to, true, cont});
            if (to == target_) return make_local(local::ConnectTo{from, false, cont});
            return cont;
          } else if constexpr (std::is_same_v<T, ast::Disconnect>) {
            const auto& from = resolve(b, n.from, n.span);
            const auto& to = resolve(b, n.to, n.span);
            if (from == target_) return make_local(local::DisconnectFrom{to, true, cont});
            if (to == target_) return make_local(local::DisconnectFrom{from, false, cont});
            return cont;
          } else if constexpr (std::is_same_v<T, ast::Do>) {
            const auto* q = m_.find_protocol(n.protocol);
            if (!q) {
              throw ProjectError(Kind::unknown_protocol,
                                 "protocol '" + n.protocol + "' is not defined", n.span);
            }
            if (q->role_params.size() != n.role_args.size()) {
              throw ProjectError(Kind::unknown_role,
                                 "'" + n.protocol + "' expects " +
                                     std::to_string(q->role_params.size()) + " roles",
                                 n.span);
            }
            Binding callee{q->role_params, {}};
            for (const auto& arg : n.role_args) callee.concrete.push_back(resolve(b, arg, n.span));
            return call(*q, std::move(callee), cont, n.span);
          } else {
            return choice(b, n, cont);
          }
        },
        s.node);
  }

  LocalTypePtr choice(const Binding& b, const ast::Choice& c, const LocalTypePtr& cont) {
    const auto& decider = resolve(b, c.at, c.span);
    std::vector<LocalTypePtr> branches;
    branches.reserve(c.branches.size());
    for (const auto& br : c.branches) branches.push_back(seq(b, br, cont));

    if (decider != target_) {
      LocalTypePtr acc = branches.front();
      for (std::size_t i = 1; i < branches.size(); ++i) acc = merge(acc, branches[i], c.span);
      return acc;
    }

    std::string peer;
    std::vector<LocalMessage> entries;
    for (const auto& bp : branches) {
      std::string to;
      std::vector<LocalMessage> msgs;
      if (const auto* s = std::get_if<local::SendMsg>(&bp->node)) {
        to = s->to;
        msgs.push_back(s->msg);
      } else if (const auto* sel = std::get_if<local::Select>(&bp->node)) {
        to = sel->to;
        msgs = sel->branches;
      } else {
        throw ProjectError(Kind::unmergeable,
                           "every branch of a choice at '" + c.at + "' must begin with a message "
                           "sent by '" + c.at + "'", c.span);
      }
      if (peer.empty()) peer = to;
      if (peer != to) {
        throw ProjectError(Kind::unmergeable,
                           "branches of a choice at '" + c.at + "' open towards different roles",
                           c.span);
      }
      for (auto& m : msgs) {
        for (const auto& e : entries) {
          if (lower(e.label) == lower(m.label)) {
            throw ProjectError(Kind::unmergeable,
                               "label '" + m.label + "' opens more than one branch", c.span);
          }
        }
        entries.push_back(std::move(m));
      }
    }
    if (entries.size() == 1) return make_local(local::SendMsg{peer, std::move(entries.front())});
    return make_local(local::Select{peer, std::move(entries)});
  }

  static bool as_branch(const LocalTypePtr& t, std::string& from, std::vector<LocalMessage>& msgs) {
    if (const auto* r = std::get_if<local::RecvMsg>(&t->node)) {
      from = r->from;
      msgs = {r->msg};
      return true;
    }
    if (const auto* br = std::get_if<local::Branch>(&t->node)) {
      from = br->from;
      msgs = br->branches;
      return true;
    }
    return false;
  }

  LocalTypePtr merge(const LocalTypePtr& x, const LocalTypePtr& y, const ast::SourceSpan& span) {
    if (same(x, y)) return x;
    std::string fx, fy;
    std::vector<LocalMessage> mx, my;
    if (!as_branch(x, fx, mx) || !as_branch(y, fy, my) || fx != fy) {
      throw ProjectError(Kind::unmergeable,
                         "role '" + target_ + "' is not informed of the choice but behaves "
                         "differently in its branches", span);
    }
    for (auto& m : my) {
      auto it = std::find_if(mx.begin(), mx.end(),
                             [&](const auto& e) { return lower(e.label) == lower(m.label); });
      if (it == mx.end()) {
        mx.push_back(std::move(m));
      } else if (it->label != m.label || it->payloads != m.payloads || !same(it->cont, m.cont)) {
        throw ProjectError(Kind::unmergeable,
                           "role '" + target_ + "' receives '" + m.label + "' in several branches "
                           "with different continuations", span);
      }
    }
    if (mx.size() == 1) return make_local(local::RecvMsg{fx, std::move(mx.front())});
    return make_local(local::Branch{fx, std::move(mx)});
  }

  const ast::ScribbleModule& m_;
  std::string target_;
  std::size_t max_depth_ = 1;
  std::vector<Frame> stack_;
  std::vector<RecKey> keys_;
};

}  // namespace

LocalTypePtr project(const ast::ScribbleModule& m, std::string_view protocol,
                     std::string_view role) {
  const auto* p = m.find_protocol(protocol);
  if (!p) {
    throw ProjectError(Kind::unknown_protocol,
                       "protocol '" + std::string(protocol) + "' is not defined", m.span);
  }
  if (std::find(p->role_params.begin(), p->role_params.end(), role) == p->role_params.end()) {
    throw ProjectError(Kind::unknown_role,
                       "role '" + std::string(role) + "' not declared in protocol '" + p->name + "'",
                       p->span);
  }
  return Projector(m, std::string(role)).run(*p);
}

}  // namespace mpst
