#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace mpst::ast {

/// Region of the source text. All fields are 0-based; `begin`/`end` are byte
/// offsets with `end` exclusive.
struct SourceSpan {
  std::uint32_t line = 0;
  std::uint32_t column = 0;
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  bool operator==(const SourceSpan&) const = default;
};

// Node equality below is structural and deliberately ignores spans, so that a
// re-parsed rendering compares equal to the original.

struct PayloadTypeDecl {
  std::string alias;
  std::string target_path;
  SourceSpan span;

  bool operator==(const PayloadTypeDecl& o) const {
    return alias == o.alias && target_path == o.target_path;
  }
};

struct Statement;
using Block = std::vector<Statement>;

struct Transfer {
  std::string label;
  std::vector<std::string> payloads;
  std::string from;
  std::string to;
  SourceSpan span;

  bool operator==(const Transfer& o) const {
    return label == o.label && payloads == o.payloads && from == o.from && to == o.to;
  }
};

struct Choice {
  std::string at;
  std::vector<Block> branches;
  SourceSpan span;

  bool operator==(const Choice& o) const;
};

struct Do {
  std::string protocol;
  std::vector<std::string> role_args;
  SourceSpan span;

  bool operator==(const Do& o) const {
    return protocol == o.protocol && role_args == o.role_args;
  }
};

struct Connect {
  std::string from;
  std::string to;
  SourceSpan span;

  bool operator==(const Connect& o) const { return from == o.from && to == o.to; }
};

struct Disconnect {
  std::string from;
  std::string to;
  SourceSpan span;

  bool operator==(const Disconnect& o) const { return from == o.from && to == o.to; }
};

struct Statement {
  std::variant<Transfer, Choice, Do, Connect, Disconnect> node;

  bool operator==(const Statement& o) const { return node == o.node; }
  const SourceSpan& span() const;
};

inline bool Choice::operator==(const Choice& o) const {
  return at == o.at && branches == o.branches;
}

struct GlobalProtocolDecl {
  std::string name;
  std::vector<std::string> role_params;
  Block body;
  SourceSpan span;

  bool operator==(const GlobalProtocolDecl& o) const {
    return name == o.name && role_params == o.role_params && body == o.body;
  }
};

struct ScribbleModule {
  std::string name;
  std::vector<PayloadTypeDecl> type_decls;
  std::vector<GlobalProtocolDecl> protocols;
  SourceSpan span;

  bool operator==(const ScribbleModule& o) const {
    return name == o.name && type_decls == o.type_decls && protocols == o.protocols;
  }

  const GlobalProtocolDecl* find_protocol(std::string_view protocol) const;
  const PayloadTypeDecl* find_type(std::string_view alias) const;
};

inline const SourceSpan& Statement::span() const {
  return std::visit([](const auto& n) -> const SourceSpan& { return n.span; }, node);
}

}  // namespace mpst::ast
