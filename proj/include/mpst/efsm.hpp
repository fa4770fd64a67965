#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpst/action.hpp"
#include "mpst/local_type.hpp"

namespace mpst {

using StateId = int;

enum class StateKind { output, input, terminal };

std::string_view to_string(StateKind k);

struct Transition {
  StateId from = 0;
  StateId to = 0;
  Action action = Action::send;
  std::string peer;
  std::string label;
  std::vector<std::string> payloads;

  bool operator==(const Transition&) const = default;
};

/// Endpoint finite state machine. States are numbered 0..states.size()-1.
struct Efsm {
  std::string protocol;
  std::string role;
  std::vector<StateKind> states;
  StateId initial = 0;
  std::optional<StateId> terminal;
  std::vector<Transition> transitions;

  bool operator==(const Efsm&) const = default;

  std::vector<const Transition*> outgoing(StateId s) const;
  std::size_t state_count() const { return states.size(); }
};

/// Builds the EFSM of a local type. States are numbered in depth-first
/// preorder, so the initial state is 0 and numbering is deterministic.
Efsm to_efsm(const LocalType& lt, std::string protocol, std::string role);

/// Label-split transformation: every transition leaving a state with two or
/// more outgoing transitions becomes a label edge (lowercased label, no
/// payload) into a fresh intermediate state, followed by the original
/// transition. States already in split form are left alone, which makes the
/// transformation idempotent.
Efsm split_labels(const Efsm& e);

/// True when `t` is the label half of a split pair.
bool is_label_edge(const Efsm& e, const Transition& t);

/// Lowercased label used as the branch/selection key.
std::string branch_key(std::string_view label);

/// Checks the structural invariants (one initial state, at most one terminal
/// state, homogeneity, determinism, reachability) and returns one message per
/// violation.
std::vector<std::string> check_invariants(const Efsm& e);

}  // namespace mpst
