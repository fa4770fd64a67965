#include "mpst/codegen.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <regex>
#include <set>
#include <sstream>

#include "mpst/projector.hpp"

namespace mpst::codegen {

namespace {

const std::set<std::string, std::less<>>& cpp_keywords() {
  static const std::set<std::string, std::less<>> kw = {
      "alignas",   "alignof",      "and",          "and_eq",      "asm",       "auto",
      "bitand",    "bitor",        "bool",         "break",       "case",      "catch",
      "char",      "char8_t",      "char16_t",     "char32_t",    "class",     "compl",
      "concept",   "const",        "consteval",    "constexpr",   "constinit", "const_cast",
      "continue",  "co_await",     "co_return",    "co_yield",    "decltype",  "default",
      "delete",    "do",           "double",       "dynamic_cast", "else",     "enum",
      "explicit",  "export",       "extern",       "false",       "float",     "for",
      "friend",    "goto",         "if",           "inline",      "int",       "long",
      "mutable",   "namespace",    "new",          "noexcept",    "not",       "not_eq",
      "nullptr",   "operator",     "or",           "or_eq",       "private",   "protected",
      "public",    "register",     "reinterpret_cast", "requires", "return",   "short",
      "signed",    "sizeof",       "static",       "static_assert", "static_cast", "struct",
      "switch",    "template",     "this",         "thread_local", "throw",    "true",
      "try",       "typedef",      "typeid",       "typename",    "union",     "unsigned",
      "using",     "virtual",      "void",         "volatile",    "wchar_t",   "while",
      "xor",       "xor_eq"};
  return kw;
}

std::string safe_identifier(std::string s) {
  if (cpp_keywords().count(s)) s += "_";
  return s;
}

std::string lower(std::string_view s) { return branch_key(s); }

std::string cpp_path(std::string_view dotted) {
  std::string out;
  for (char c : dotted) {
    if (c == '.') {
      out += "::";
    } else {
      out += c;
    }
  }
  return out;
}

std::string include_line(const std::string& h) {
  if (!h.empty() && (h.front() == '<' || h.front() == '"')) return "#include " + h + "\n";
  return "#include \"" + h + "\"\n";
}

struct Signature {
  std::string label;
  std::vector<std::string> payloads;

  bool operator==(const Signature&) const = default;
};

void collect(const ast::Block& b, std::vector<Signature>& out) {
  for (const auto& st : b) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ast::Transfer>) {
            out.push_back({n.label, n.payloads});
          } else if constexpr (std::is_same_v<T, ast::Choice>) {
            for (const auto& br : n.branches) collect(br, out);
          }
        },
        st.node);
  }
}

std::vector<std::string> field_names(const std::vector<std::string>& payloads) {
  std::map<std::string, int> total;
  for (const auto& p : payloads) ++total[p];
  std::map<std::string, int> seen;
  std::vector<std::string> out;
  for (const auto& p : payloads) {
    std::string f = lower(p);
    if (total[p] > 1) f += std::to_string(seen[p]++);
    if (f == "label" || f == "key" || f == "to_wire" || f == "from_wire") f += "_";
    out.push_back(safe_identifier(f));
  }
  return out;
}

struct Capability {
  std::string text;
  std::string branch_record;
};

}  // namespace

std::string_view to_string(CodegenError::Kind k) {
  switch (k) {
    case CodegenError::Kind::unknown_alias: return "UnknownAlias";
    case CodegenError::Kind::invalid_efsm: return "InvalidEfsm";
    case CodegenError::Kind::not_split: return "NotSplit";
    case CodegenError::Kind::name_collision: return "NameCollision";
    case CodegenError::Kind::bad_import_map: return "BadImportMap";
  }
  return "?";
}

void GeneratedArtifact::merge(const GeneratedArtifact& other) {
  for (const auto& [k, v] : other.files) files[k] = v;
  auto add = [](std::vector<std::string>& into, const std::vector<std::string>& from) {
    for (const auto& x : from) {
      if (std::find(into.begin(), into.end(), x) == into.end()) into.push_back(x);
    }
  };
  add(entry_names.states, other.entry_names.states);
  add(entry_names.roles, other.entry_names.roles);
  add(entry_names.messages, other.entry_names.messages);
}

ImportMap parse_import_map(std::string_view json_text) {
  auto j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw CodegenError(CodegenError::Kind::bad_import_map, "import map is not a JSON object");
  }
  ImportMap m;
  auto a = j.find("aliases");
  if (a == j.end() || !a->is_object()) {
    throw CodegenError(CodegenError::Kind::bad_import_map, "import map has no \"aliases\" object");
  }
  for (auto it = a->begin(); it != a->end(); ++it) {
    if (!it.value().is_string() || it.value().get_ref<const std::string&>().empty()) {
      throw CodegenError(CodegenError::Kind::bad_import_map,
                         "import map entry for '" + it.key() + "' is not a type name");
    }
    m.aliases[it.key()] = it.value().get<std::string>();
  }
  if (auto inc = j.find("includes"); inc != j.end()) {
    if (!inc->is_array()) {
      throw CodegenError(CodegenError::Kind::bad_import_map, "\"includes\" is not an array");
    }
    for (const auto& h : *inc) {
      if (!h.is_string()) {
        throw CodegenError(CodegenError::Kind::bad_import_map, "\"includes\" holds a non-string");
      }
      m.includes.push_back(h.get<std::string>());
    }
  }
  return m;
}

std::string message_type_name(std::string_view label, const std::vector<std::string>& payloads) {
  std::string out(label);
  for (const auto& p : payloads) out += "_" + p;
  return safe_identifier(out);
}

std::string state_type_name(StateId s) { return "S" + std::to_string(s); }

std::string branch_record_name(StateId s) { return state_type_name(s) + "_branches"; }

std::string handler_field_name(std::string_view label) { return safe_identifier(lower(label)); }

std::string messages_namespace(std::string_view module_name) {
  return cpp_path(module_name) + "::messages";
}

std::string api_namespace(std::string_view module_name, std::string_view protocol,
                          std::string_view role) {
  return cpp_path(module_name) + "::" + std::string(protocol) + "_" + std::string(role);
}

std::string api_path(std::string_view module_name, std::string_view protocol,
                     std::string_view role) {
  return std::string(module_name) + "/" + std::string(protocol) + "_" + std::string(role) + ".hpp";
}

std::string messages_path(std::string_view module_name) {
  return std::string(module_name) + "/messages.hpp";
}

GeneratedArtifact generate_message_types(const ast::ScribbleModule& m,
                                         const std::optional<ImportMap>& imports) {
  std::vector<Signature> sigs;
  for (const auto& p : m.protocols) collect(p.body, sigs);

  std::map<std::string, Signature> records;
  for (const auto& s : sigs) {
    auto name = message_type_name(s.label, s.payloads);
    auto [it, fresh] = records.emplace(name, s);
    if (!fresh && !(it->second == s)) {
      throw CodegenError(CodegenError::Kind::name_collision,
                         "messages '" + s.label + "' and '" + it->second.label +
                             "' both map to record " + name);
    }
  }

  std::map<std::string, std::string> aliases;
  for (const auto& [name, s] : records) {
    for (const auto& p : s.payloads) {
      if (aliases.count(p)) continue;
      if (imports) {
        auto it = imports->aliases.find(p);
        if (it == imports->aliases.end()) {
          throw CodegenError(CodegenError::Kind::unknown_alias,
                             "no import-map entry for payload type '" + p + "'");
        }
        aliases[p] = it->second;
      } else {
        const auto* d = m.find_type(p);
        if (!d) {
          throw CodegenError(CodegenError::Kind::unknown_alias,
                             "payload type '" + p + "' is not declared");
        }
        aliases[p] = d->target_path.find('.') != std::string::npos
                         ? "::" + cpp_path(d->target_path)
                         : d->target_path;
      }
    }
  }

  const std::string ns = messages_namespace(m.name);
  std::ostringstream o;
  o << "#pragma once\n\n#include <string>\n#include <string_view>\n\n#include <mpst/rt/wire.hpp>\n";
  if (imports && !imports->includes.empty()) {
    o << "\n";
    for (const auto& h : imports->includes) o << include_line(h);
  }
  o << "\nnamespace " << ns << " {\n";
  if (!aliases.empty()) {
    o << "\nnamespace types {\n";
    for (const auto& [a, t] : aliases) o << "using " << safe_identifier(a) << " = " << t << ";\n";
    o << "}  // namespace types\n";
  }

  GeneratedArtifact art;
  for (const auto& [name, s] : records) {
    art.entry_names.messages.push_back(name);
    const auto fields = field_names(s.payloads);
    o << "\nstruct " << name << " {\n";
    o << "  static constexpr std::string_view label = \"" << s.label << "\";\n";
    o << "  static constexpr std::string_view key = \"" << lower(s.label) << "\";\n";
    if (!fields.empty()) o << "\n";
    for (std::size_t i = 0; i < fields.size(); ++i) {
      o << "  types::" << safe_identifier(s.payloads[i]) << " " << fields[i] << "{};\n";
    }
    o << "\n  mpst::rt::WireMessage to_wire() const {\n";
    o << "    mpst::rt::WireMessage m{std::string(label), nlohmann::json::array()};\n";
    for (const auto& f : fields) o << "    m.payload.push_back(" << f << ");\n";
    o << "    return m;\n  }\n";
    o << "\n  static " << name << " from_wire(const mpst::rt::WireMessage& m) {\n";
    o << "    mpst::rt::expect_arity(m, " << fields.size() << ");\n";
    o << "    return " << name << "{";
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) o << ", ";
      o << "mpst::rt::payload_at<types::" << safe_identifier(s.payloads[i]) << ">(m, " << i << ")";
    }
    o << "};\n  }\n};\n";
  }
  o << "\n}  // namespace " << ns << "\n";
  art.files[messages_path(m.name)] = o.str();
  return art;
}

GeneratedArtifact generate_api(const Efsm& e, const ApiOptions& opts) {
  if (auto v = check_invariants(e); !v.empty()) {
    std::string msg = "EFSM of " + e.protocol + "@" + e.role + " is not well formed:";
    for (const auto& s : v) msg += "\n  " + s;
    throw CodegenError(CodegenError::Kind::invalid_efsm, msg);
  }
  for (std::size_t s = 0; s < e.state_count(); ++s) {
    auto out = e.outgoing(static_cast<StateId>(s));
    if (out.size() < 2) continue;
    for (const auto* t : out) {
      if (!is_label_edge(e, *t)) {
        throw CodegenError(CodegenError::Kind::not_split,
                           "state " + std::to_string(s) + " of " + e.protocol + "@" + e.role +
                               " is not label-split");
      }
    }
  }

  std::vector<std::string> roles{e.role};
  for (const auto& t : e.transitions) {
    if (std::find(roles.begin(), roles.end(), t.peer) == roles.end()) roles.push_back(t.peer);
  }
  static const std::regex reserved(R"(S\d+(_branches)?)");
  for (const auto& r : roles) {
    if (std::regex_match(r, reserved)) {
      throw CodegenError(CodegenError::Kind::name_collision,
                         "role name '" + r + "' clashes with a generated state name");
    }
  }

  const std::string ns = api_namespace(opts.module_name, e.protocol, e.role);
  const std::string q = "::" + ns + "::";
  const std::string msgs = "::" + messages_namespace(opts.module_name) + "::";
  auto role = [&](const std::string& r) { return q + safe_identifier(r); };
  auto state = [&](StateId s) { return q + state_type_name(s); };

  GeneratedArtifact art;
  std::ostringstream decl;
  std::ostringstream caps;

  decl << "#pragma once\n\n#include <string_view>\n#include <tuple>\n\n#include <mpst/rt/mpst.hpp>\n\n"
       << "#include \"messages.hpp\"\n\nnamespace " << ns << " {\n\n";
  for (const auto& r : roles) {
    art.entry_names.roles.push_back(r);
    decl << "struct " << safe_identifier(r) << " {\n"
         << "  static constexpr std::string_view name = \"" << r << "\";\n"
         << "  static constexpr std::string_view protocol = \"" << e.protocol << "\";\n};\n";
  }
  decl << "\n";
  for (std::size_t s = 0; s < e.state_count(); ++s) {
    art.entry_names.states.push_back(state_type_name(static_cast<StateId>(s)));
    decl << "struct " << state_type_name(static_cast<StateId>(s)) << ";\n";
  }

  std::set<std::string> used_messages;
  for (std::size_t si = 0; si < e.state_count(); ++si) {
    const auto s = static_cast<StateId>(si);
    auto out = e.outgoing(s);
    if (out.empty()) continue;
    const bool output = e.states[si] == StateKind::output;
    const Transition& t = *out.front();
    caps << "\ntemplate <>\nstruct Capability<" << state(s) << "> : ";
    if (out.size() >= 2) {
      const std::string rec = branch_record_name(s);
      std::ostringstream table;
      table << "Table<";
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (i) table << ", ";
        table << "Entry<\"" << out[i]->label << "\", " << state(out[i]->to) << ">";
      }
      table << ">";
      if (output) {
        caps << "Select<" << role(t.peer) << ", " << table.str() << "> {};\n";
      } else {
        decl << "\ntemplate <";
        for (std::size_t i = 0; i < out.size(); ++i) decl << (i ? ", " : "") << "class T" << i;
        decl << ">\nstruct " << rec << " {\n";
        for (std::size_t i = 0; i < out.size(); ++i) {
          decl << "  T" << i << " " << handler_field_name(out[i]->label) << ";\n";
        }
        decl << "};\n";
        caps << "Branch<" << role(t.peer) << ", " << table.str() << "> {\n"
             << "  template <class H>\n"
             << "  static constexpr bool accepts = is_instance_v<H, " << q << rec << ">;\n\n"
             << "  template <class H>\n"
             << "  static auto fields(const H& h) {\n    return std::forward_as_tuple(";
        for (std::size_t i = 0; i < out.size(); ++i) {
          caps << (i ? ", " : "") << "h." << handler_field_name(out[i]->label);
        }
        caps << ");\n  }\n};\n";
      }
      continue;
    }
    switch (t.action) {
      case Action::send:
      case Action::receive: {
        const auto name = message_type_name(t.label, t.payloads);
        used_messages.insert(name);
        caps << (t.action == Action::send ? "Send<" : "Receive<") << role(t.peer) << ", "
             << state(t.to) << ", " << msgs << name << "> {};\n";
        break;
      }
      case Action::connect:
        caps << (output ? "Connect<" : "Accept<") << role(t.peer) << ", " << state(t.to)
             << "> {};\n";
        break;
      case Action::disconnect:
        caps << (output ? "Disconnect<" : "AwaitDisconnect<") << role(t.peer) << ", "
             << state(t.to) << "> {};\n";
        break;
    }
  }
  art.entry_names.messages.assign(used_messages.begin(), used_messages.end());

  caps << "\ntemplate <>\nstruct Initial<" << role(e.role) << "> {\n  using state = "
       << state(e.initial) << ";\n};\n";
  if (e.terminal) {
    caps << "\ntemplate <>\nstruct Terminal<" << role(e.role) << "> {\n  using state = "
         << state(*e.terminal) << ";\n};\n";
  }

  std::ostringstream file;
  file << decl.str() << "\n}  // namespace " << ns << "\n\nnamespace mpst::rt {\n"
       << caps.str() << "\n}  // namespace mpst::rt\n";
  art.files[api_path(opts.module_name, e.protocol, e.role)] = file.str();
  return art;
}

GeneratedArtifact generate_protocol(const ast::ScribbleModule& m, const std::string& protocol,
                                    const std::vector<std::string>& roles,
                                    const std::optional<ImportMap>& imports) {
  std::vector<std::string> rs = roles;
  if (rs.empty()) {
    const auto* p = m.find_protocol(protocol);
    if (!p) {
      throw ProjectError(ProjectError::Kind::unknown_protocol,
                         "protocol '" + protocol + "' is not declared", {});
    }
    rs = p->role_params;
  }
  GeneratedArtifact art;
  for (const auto& r : rs) {
    auto e = split_labels(to_efsm(*project(m, protocol, r), protocol, r));
    art.merge(generate_api(e, {m.name}));
  }
  art.merge(generate_message_types(m, imports));
  return art;
}

void write_artifact(const GeneratedArtifact& a, const std::string& dir) {
  namespace fs = std::filesystem;
  for (const auto& [rel, text] : a.files) {
    fs::path p = fs::path(dir) / rel;
    fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + p.string());
  }
}

}  // namespace mpst::codegen
