#pragma once

#include <string>
#include <vector>

#include "mpst/ast.hpp"

namespace mpst {

enum class Severity { error, warning };

std::string_view to_string(Severity s);

struct Diagnostic {
  Severity severity = Severity::error;
  /// Short stable identifier such as CHOICE_SENDER or UNKNOWN_ALIAS.
  std::string code;
  std::string message;
  ast::SourceSpan span;
};

inline constexpr std::size_t kMaxDiagnostics = 100;

/// Well-formedness checks run before projection. Diagnostics are collected
/// (capped at kMaxDiagnostics) and sorted by source position.
///
/// Error codes:
///   CHOICE_SENDER          a branch does not open with an action of the decider
///   DUP_LABEL              sibling branches open with the same label towards one role
///   DO_ARITY               `do` passes the wrong number of roles
///   UNKNOWN_PROTOCOL       `do` names an undefined protocol
///   UNKNOWN_ALIAS          payload type is not declared
///   UNKNOWN_ROLE           role is not a parameter of the protocol
///   SELF_INTERACTION       an action from a role to itself
///   RESERVED_LABEL         label starting with "__"
///   DUP_PROTOCOL, DUP_TYPE, DUP_ROLE, ROLE_COUNT
///   CONNECT_ORDER          message between roles that are not connected
///   DOUBLE_CONNECT         connect between roles already connected
///   DISCONNECT_UNCONNECTED disconnect between roles that are not connected
///   UNMERGEABLE            projection fails for some role
/// Warnings: UNUSED_TYPE.
std::vector<Diagnostic> check_well_formed(const ast::ScribbleModule& m);

bool has_errors(const std::vector<Diagnostic>& ds);

}  // namespace mpst
