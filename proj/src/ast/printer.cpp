#include <sstream>

#include "mpst/parser.hpp"

namespace mpst::ast {

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

void render_into(std::ostringstream& os, const Block& block, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
  for (const auto& stmt : block) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Transfer>) {
            os << pad << n.label << "(" << join(n.payloads) << ") from " << n.from << " to " << n.to
               << ";\n";
          } else if constexpr (std::is_same_v<T, Choice>) {
            os << pad << "choice at " << n.at << " {\n";
            for (std::size_t i = 0; i < n.branches.size(); ++i) {
              if (i) os << pad << "} or {\n";
              render_into(os, n.branches[i], depth + 1);
            }
            os << pad << "}\n";
          } else if constexpr (std::is_same_v<T, Do>) {
            os << pad << "do " << n.protocol << "(" << join(n.role_args) << ");\n";
          } else if constexpr (std::is_same_v<T, Connect>) {
            os << pad << "connect " << n.from << " to " << n.to << ";\n";
          } else {
            os << pad << "disconnect " << n.from << " and " << n.to << ";\n";
          }
        },
        stmt.node);
  }
}

}  // namespace

std::string render_block(const Block& block, int depth) {
  std::ostringstream os;
  render_into(os, block, depth);
  return os.str();
}

std::string render_module(const ScribbleModule& m) {
  std::ostringstream os;
  os << "module " << m.name << ";\n";
  if (!m.type_decls.empty()) os << "\n";
  for (const auto& t : m.type_decls) {
    os << "type " << t.alias << " as " << quote(t.target_path) << ";\n";
  }
  for (const auto& p : m.protocols) {
    os << "\nglobal protocol " << p.name << "(";
    for (std::size_t i = 0; i < p.role_params.size(); ++i) {
      if (i) os << ", ";
      os << "role " << p.role_params[i];
    }
    os << ") {\n";
    render_into(os, p.body, 1);
    os << "}\n";
  }
  return os.str();
}

}  // namespace mpst::ast
