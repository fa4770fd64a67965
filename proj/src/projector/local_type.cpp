#include "mpst/local_type.hpp"

#include <sstream>

namespace mpst {

namespace {

bool same_msg(const LocalMessage& a, const LocalMessage& b) {
  return a.label == b.label && a.payloads == b.payloads && same(a.cont, b.cont);
}

bool same_msgs(const std::vector<LocalMessage>& a, const std::vector<LocalMessage>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_msg(a[i], b[i])) return false;
  }
  return true;
}

std::string sig(const LocalMessage& m) {
  std::string s = m.label + "(";
  for (std::size_t i = 0; i < m.payloads.size(); ++i) {
    if (i) s += ", ";
    s += m.payloads[i];
  }
  return s + ")";
}

void render(std::ostringstream& os, const LocalType& t, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, local::SendMsg>) {
          os << pad << n.to << "!" << sig(n.msg) << "\n";
          render(os, *n.msg.cont, depth);
        } else if constexpr (std::is_same_v<T, local::RecvMsg>) {
          os << pad << n.from << "?" << sig(n.msg) << "\n";
          render(os, *n.msg.cont, depth);
        } else if constexpr (std::is_same_v<T, local::Select> || std::is_same_v<T, local::Branch>) {
          constexpr bool sel = std::is_same_v<T, local::Select>;
          if constexpr (sel) {
            os << pad << n.to << " select {\n";
          } else {
            os << pad << n.from << " branch {\n";
          }
          for (const auto& b : n.branches) {
            os << pad << "  " << (sel ? "!" : "?") << sig(b) << ":\n";
            render(os, *b.cont, depth + 2);
          }
          os << pad << "}\n";
        } else if constexpr (std::is_same_v<T, local::ConnectTo>) {
          os << pad << (n.initiator ? "connect " : "accept ") << n.peer << "\n";
          render(os, *n.cont, depth);
        } else if constexpr (std::is_same_v<T, local::DisconnectFrom>) {
          os << pad << "disconnect " << n.peer << "\n";
          render(os, *n.cont, depth);
        } else if constexpr (std::is_same_v<T, local::RecVar>) {
          os << pad << "continue X" << n.id << "\n";
        } else if constexpr (std::is_same_v<T, local::Rec>) {
          os << pad << "rec X" << n.id << " [" << n.name << "] {\n";
          render(os, *n.body, depth + 1);
          os << pad << "}\n";
        } else {
          os << pad << "end\n";
        }
      },
      t.node);
}

}  // namespace

bool same(const LocalTypePtr& a, const LocalTypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

bool operator==(const LocalType& a, const LocalType& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, local::SendMsg>) {
          return x.to == y.to && same_msg(x.msg, y.msg);
        } else if constexpr (std::is_same_v<T, local::RecvMsg>) {
          return x.from == y.from && same_msg(x.msg, y.msg);
        } else if constexpr (std::is_same_v<T, local::Select>) {
          return x.to == y.to && same_msgs(x.branches, y.branches);
        } else if constexpr (std::is_same_v<T, local::Branch>) {
          return x.from == y.from && same_msgs(x.branches, y.branches);
        } else if constexpr (std::is_same_v<T, local::ConnectTo> ||
                             std::is_same_v<T, local::DisconnectFrom>) {
          return x.peer == y.peer && x.initiator == y.initiator && same(x.cont, y.cont);
        } else if constexpr (std::is_same_v<T, local::RecVar>) {
          return x.id == y.id;
        } else if constexpr (std::is_same_v<T, local::Rec>) {
          return x.id == y.id && same(x.body, y.body);
        } else {
          return true;
        }
      },
      a.node);
}

LocalTypePtr make_end() {
  static const LocalTypePtr end = std::make_shared<const LocalType>(LocalType{local::End{}});
  return end;
}

LocalTypePtr make_local(decltype(LocalType::node) node) {
  return std::make_shared<const LocalType>(LocalType{std::move(node)});
}

std::string to_string(const LocalType& t) {
  std::ostringstream os;
  render(os, t, 0);
  return os.str();
}

}  // namespace mpst
