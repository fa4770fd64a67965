#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpst/ast.hpp"
#include "mpst/efsm.hpp"

namespace mpst {

struct TraceStep {
  std::string sender;
  std::string receiver;
  std::string label;
  Action action = Action::send;  // send = enqueue, receive = dequeue

  bool operator==(const TraceStep&) const = default;
};

struct ComposedReport {
  enum class Result { ok, deadlock, orphan, unspecified_reception };

  std::size_t explored_states = 0;
  Result result = Result::ok;
  /// Steps from the initial global state to the defective one.
  std::vector<TraceStep> trace;
  /// Orphaned or unexpected message, or a description of the stuck state.
  std::string message;
};

std::string_view to_string(ComposedReport::Result r);

class ExplosionLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ComposeOptions {
  /// Capacity of each ordered-pair FIFO. 0 means synchronous hand-off.
  std::size_t buffer_bound = 1;
  std::size_t state_cap = 1'000'000;
};

/// Breadth-first exploration of the product of all role EFSMs communicating
/// over bounded FIFO buffers. Connection actions synchronize both sides.
ComposedReport compose_efsms(const std::vector<Efsm>& machines, ComposeOptions opts = {});

/// Projects every role of `protocol` and explores their composition.
ComposedReport compose_check(const ast::ScribbleModule& m, std::string_view protocol,
                             ComposeOptions opts = {});

}  // namespace mpst
