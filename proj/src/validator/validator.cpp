#include "mpst/validator.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <tuple>

#include "mpst/projector.hpp"

namespace mpst {

std::string_view to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

bool has_errors(const std::vector<Diagnostic>& ds) {
  return std::any_of(ds.begin(), ds.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::error; });
}

namespace {

using ast::SourceSpan;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Formal role names of a callee mapped to the caller's names.
using RoleMap = std::map<std::string, std::string>;

std::string subst(const RoleMap& rm, const std::string& r) {
  auto it = rm.find(r);
  return it == rm.end() ? r : it->second;
}

// An opening action of a branch, seen from the choice's protocol.
struct Opening {
  std::string from;
  std::string to;
  std::string label;
  bool is_connect = false;
  SourceSpan span;
};

class Validator {
 public:
  explicit Validator(const ast::ScribbleModule& m) : m_(m) {}

  std::vector<Diagnostic> run() {
    module_level();
    for (const auto& p : m_.protocols) protocol(p);
    for (const auto& p : m_.protocols) connections(p);
    unused_types();
    if (!has_errors(out_)) mergeability();
    std::stable_sort(out_.begin(), out_.end(), [](const Diagnostic& a, const Diagnostic& b) {
      return a.span.begin < b.span.begin;
    });
    if (out_.size() > kMaxDiagnostics) out_.resize(kMaxDiagnostics);
    return std::move(out_);
  }

 private:
  void report(std::string code, std::string message, const SourceSpan& span,
              Severity sev = Severity::error) {
    if (!seen_.insert({code, span.begin, message}).second) return;
    if (out_.size() > kMaxDiagnostics) return;
    out_.push_back(Diagnostic{sev, std::move(code), std::move(message), span});
  }

  void module_level() {
    std::set<std::string> types;
    for (const auto& t : m_.type_decls) {
      if (!types.insert(t.alias).second) {
        report("DUP_TYPE", "payload type '" + t.alias + "' is declared more than once", t.span);
      }
    }
    std::set<std::string> protos;
    for (const auto& p : m_.protocols) {
      if (!protos.insert(p.name).second) {
        report("DUP_PROTOCOL", "protocol '" + p.name + "' is defined more than once", p.span);
      }
    }
  }

  void protocol(const ast::GlobalProtocolDecl& p) {
    std::set<std::string> roles;
    for (const auto& r : p.role_params) {
      if (!roles.insert(r).second) {
        report("DUP_ROLE", "role '" + r + "' is declared more than once in '" + p.name + "'",
               p.span);
      }
    }
    if (p.role_params.size() < 2) {
      report("ROLE_COUNT", "protocol '" + p.name + "' needs at least two roles", p.span);
    }
    block(p, roles, p.body);
  }

  void role_use(const std::set<std::string>& roles, const std::string& r,
                const ast::GlobalProtocolDecl& p, const SourceSpan& span) {
    if (!roles.count(r)) {
      report("UNKNOWN_ROLE", "role '" + r + "' is not declared in protocol '" + p.name + "'", span);
    }
  }

  void pair(const std::set<std::string>& roles, const std::string& from, const std::string& to,
            const ast::GlobalProtocolDecl& p, const SourceSpan& span) {
    role_use(roles, from, p, span);
    role_use(roles, to, p, span);
    if (from == to) report("SELF_INTERACTION", "role '" + from + "' interacts with itself", span);
  }

  void block(const ast::GlobalProtocolDecl& p, const std::set<std::string>& roles,
             const ast::Block& b) {
    for (const auto& s : b) {
      std::visit(
          [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ast::Transfer>) {
              pair(roles, n.from, n.to, p, n.span);
              if (n.label.rfind("__", 0) == 0) {
                report("RESERVED_LABEL", "label '" + n.label + "' uses the reserved prefix '__'",
                       n.span);
              }
              for (const auto& a : n.payloads) {
                used_types_.insert(a);
                if (!m_.find_type(a)) {
                  report("UNKNOWN_ALIAS", "payload type '" + a + "' is not declared", n.span);
                }
              }
            } else if constexpr (std::is_same_v<T, ast::Connect> ||
                                 std::is_same_v<T, ast::Disconnect>) {
              pair(roles, n.from, n.to, p, n.span);
            } else if constexpr (std::is_same_v<T, ast::Do>) {
              do_call(p, roles, n);
            } else {
              role_use(roles, n.at, p, n.span);
              for (const auto& br : n.branches) block(p, roles, br);
              choice(n);
            }
          },
          s.node);
    }
  }

  void do_call(const ast::GlobalProtocolDecl& p, const std::set<std::string>& roles,
               const ast::Do& d) {
    std::set<std::string> args;
    for (const auto& a : d.role_args) {
      role_use(roles, a, p, d.span);
      if (!args.insert(a).second) {
        report("DUP_ROLE", "role '" + a + "' is passed more than once to '" + d.protocol + "'",
               d.span);
      }
    }
    const auto* q = m_.find_protocol(d.protocol);
    if (!q) {
      report("UNKNOWN_PROTOCOL", "protocol '" + d.protocol + "' is not defined", d.span);
      return;
    }
    if (q->role_params.size() != d.role_args.size()) {
      report("DO_ARITY",
             "'" + d.protocol + "' expects " + std::to_string(q->role_params.size()) +
                 " roles but " + std::to_string(d.role_args.size()) + " were given",
             d.span);
    }
  }

  // Opening actions of a block: the first statement, looking through nested
  // choices and `do` calls. `site` replaces spans found inside callees so
  // that diagnostics stay within the choice being checked.
  void openings(const ast::Block& b, const RoleMap& rm, const SourceSpan* site,
                std::set<std::string>& visiting, std::vector<Opening>& out) {
    if (b.empty()) return;
    const auto& s = b.front();
    const SourceSpan& span = site ? *site : s.span();
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ast::Transfer>) {
            out.push_back(Opening{subst(rm, n.from), subst(rm, n.to), n.label, false, span});
          } else if constexpr (std::is_same_v<T, ast::Connect>) {
            out.push_back(Opening{subst(rm, n.from), subst(rm, n.to), "", true, span});
          } else if constexpr (std::is_same_v<T, ast::Disconnect>) {
            out.push_back(Opening{subst(rm, n.from), subst(rm, n.to), "", true, span});
          } else if constexpr (std::is_same_v<T, ast::Choice>) {
            for (const auto& br : n.branches) openings(br, rm, site, visiting, out);
          } else {
            const auto* q = m_.find_protocol(n.protocol);
            if (!q || q->role_params.size() != n.role_args.size()) return;
            RoleMap inner;
            std::string key = n.protocol;
            for (std::size_t i = 0; i < q->role_params.size(); ++i) {
              inner[q->role_params[i]] = subst(rm, n.role_args[i]);
              key += "," + inner[q->role_params[i]];
            }
            if (!visiting.insert(key).second) return;
            openings(q->body, inner, &span, visiting, out);
            visiting.erase(key);
          }
        },
        s.node);
  }

  void choice(const ast::Choice& c) {
    std::vector<std::vector<Opening>> per_branch;
    for (const auto& br : c.branches) {
      std::vector<Opening> ops;
      std::set<std::string> visiting;
      openings(br, {}, nullptr, visiting, ops);
      if (br.empty()) {
        report("CHOICE_SENDER", "a branch of the choice at '" + c.at + "' is empty", c.span);
      }
      for (const auto& o : ops) {
        if (o.from != c.at) {
          report("CHOICE_SENDER",
                 "branch of the choice at '" + c.at + "' opens with an action by '" + o.from +
                     "'",
                 o.span);
        }
      }
      per_branch.push_back(std::move(ops));
    }
    for (std::size_t i = 0; i < per_branch.size(); ++i) {
      for (std::size_t j = i + 1; j < per_branch.size(); ++j) {
        for (const auto& b : per_branch[j]) {
          if (b.is_connect) continue;
          for (const auto& a : per_branch[i]) {
            if (a.is_connect || a.to != b.to || lower(a.label) != lower(b.label)) continue;
            report("DUP_LABEL",
                   "label '" + b.label + "' towards '" + b.to + "' opens more than one branch of "
                   "the choice at '" + c.at + "'",
                   b.span);
            break;
          }
        }
      }
    }
  }

  // Connection discipline, only for protocols that manage connections.
  static bool uses_connect(const ast::Block& b) {
    for (const auto& s : b) {
      if (std::holds_alternative<ast::Connect>(s.node)) return true;
      if (const auto* c = std::get_if<ast::Choice>(&s.node)) {
        for (const auto& br : c->branches) {
          if (uses_connect(br)) return true;
        }
      }
    }
    return false;
  }

  struct Cursor {
    const ast::Block* block;
    std::size_t pos;
    RoleMap rm;
  };
  using Conn = std::set<std::pair<std::string, std::string>>;

  static std::pair<std::string, std::string> key(std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
  }

  void connections(const ast::GlobalProtocolDecl& p) {
    if (!uses_connect(p.body)) return;
    std::set<std::pair<std::string, Conn>> memo;
    std::size_t budget = 100'000;
    walk({Cursor{&p.body, 0, {}}}, {}, memo, budget);
  }

  void walk(std::vector<Cursor> k, Conn conn, std::set<std::pair<std::string, Conn>>& memo,
            std::size_t& budget) {
    while (!k.empty()) {
      if (budget == 0 || out_.size() >= kMaxDiagnostics) return;
      --budget;
      Cursor& top = k.back();
      if (top.pos >= top.block->size()) {
        k.pop_back();
        continue;
      }
      const ast::Statement& s = (*top.block)[top.pos++];
      const RoleMap rm = top.rm;
      if (const auto* t = std::get_if<ast::Transfer>(&s.node)) {
        auto from = subst(rm, t->from);
        auto to = subst(rm, t->to);
        if (!conn.count(key(from, to))) {
          report("CONNECT_ORDER",
                 "'" + t->label + "' is sent from '" + from + "' to '" + to +
                     "' before they are connected",
                 t->span);
        }
      } else if (const auto* c = std::get_if<ast::Connect>(&s.node)) {
        if (!conn.insert(key(subst(rm, c->from), subst(rm, c->to))).second) {
          report("DOUBLE_CONNECT",
                 "'" + subst(rm, c->from) + "' and '" + subst(rm, c->to) + "' are already connected",
                 c->span);
        }
      } else if (const auto* d = std::get_if<ast::Disconnect>(&s.node)) {
        if (!conn.erase(key(subst(rm, d->from), subst(rm, d->to)))) {
          report("DISCONNECT_UNCONNECTED",
                 "'" + subst(rm, d->from) + "' and '" + subst(rm, d->to) + "' are not connected",
                 d->span);
        }
      } else if (const auto* ch = std::get_if<ast::Choice>(&s.node)) {
        for (const auto& br : ch->branches) {
          auto k2 = k;
          k2.push_back(Cursor{&br, 0, rm});
          walk(std::move(k2), conn, memo, budget);
        }
        return;
      } else if (const auto* dc = std::get_if<ast::Do>(&s.node)) {
        const auto* q = m_.find_protocol(dc->protocol);
        if (!q || q->role_params.size() != dc->role_args.size()) continue;
        RoleMap inner;
        std::string id = dc->protocol;
        for (std::size_t i = 0; i < q->role_params.size(); ++i) {
          inner[q->role_params[i]] = subst(rm, dc->role_args[i]);
          id += "," + inner[q->role_params[i]];
        }
        if (!memo.insert({id, conn}).second) return;
        k.push_back(Cursor{&q->body, 0, std::move(inner)});
      }
    }
  }

  void unused_types() {
    for (const auto& t : m_.type_decls) {
      if (!used_types_.count(t.alias)) {
        report("UNUSED_TYPE", "payload type '" + t.alias + "' is never used", t.span,
               Severity::warning);
      }
    }
  }

  void mergeability() {
    for (const auto& p : m_.protocols) {
      for (const auto& r : p.role_params) {
        try {
          project(m_, p.name, r);
        } catch (const ProjectError& e) {
          std::string code = "UNMERGEABLE";
          if (e.kind() == ProjectError::Kind::non_tail_recursion) code = "NON_TAIL_RECURSION";
          if (e.kind() == ProjectError::Kind::unbounded_rec) code = "UNBOUNDED_REC";
          report(code, e.what(), e.span());
        }
      }
    }
  }

  const ast::ScribbleModule& m_;
  std::vector<Diagnostic> out_;
  std::set<std::tuple<std::string, std::uint32_t, std::string>> seen_;
  std::set<std::string> used_types_;
};

}  // namespace

std::vector<Diagnostic> check_well_formed(const ast::ScribbleModule& m) {
  return Validator(m).run();
}

}  // namespace mpst
