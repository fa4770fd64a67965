#pragma once

#include <stdexcept>
#include <string>

#include "mpst/ast.hpp"
#include "mpst/local_type.hpp"

namespace mpst {

class ProjectError : public std::runtime_error {
 public:
  enum class Kind {
    unknown_protocol,
    unknown_role,
    unmergeable,
    unbounded_rec,
    non_tail_recursion,
  };

  ProjectError(Kind kind, const std::string& message, ast::SourceSpan span)
      : std::runtime_error(message), kind_(kind), span_(span) {}

  Kind kind() const { return kind_; }
  const ast::SourceSpan& span() const { return span_; }

 private:
  Kind kind_;
  ast::SourceSpan span_;
};

const char* to_string(ProjectError::Kind kind);

/// Projects `protocol` of `m` onto `role`.
///
/// Interactions not involving the role are elided. Choices are turned into
/// Select (role decides) or Branch (role is told), or merged when the role is
/// not informed: branches merge iff their projections are identical, or all
/// open with receives from one peer under distinct labels (identical
/// continuations are required for a label shared by several branches).
/// Nested choices by the same decider towards the same peer flatten into one
/// Select/Branch. `do` calls are inlined; a call whose (protocol, role
/// binding) is already being projected becomes a recursion variable, which
/// requires it to be in tail position.
LocalTypePtr project(const ast::ScribbleModule& m, std::string_view protocol,
                     std::string_view role);

}  // namespace mpst
