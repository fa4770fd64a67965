#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mpst/ast.hpp"

namespace mpst::ast {

/// Raised for malformed input. `expected` lists the token kinds that would
/// have been accepted at `span`.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, SourceSpan span, std::set<std::string> expected)
      : std::runtime_error(message), span_(span), expected_(std::move(expected)) {}

  const SourceSpan& span() const { return span_; }
  const std::set<std::string>& expected() const { return expected_; }

 private:
  SourceSpan span_;
  std::set<std::string> expected_;
};

/// Parses a Scribble module. Line comments (`//`) are skipped.
ScribbleModule parse_module(std::string_view text);

/// Renders a module back to Scribble source. `parse_module(render_module(m))`
/// is structurally equal to `m`.
std::string render_module(const ScribbleModule& m);

/// Renders a single statement list at the given indentation depth.
std::string render_block(const Block& block, int depth);

}  // namespace mpst::ast
