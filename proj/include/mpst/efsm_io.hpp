#pragma once

#include <stdexcept>
#include <string>

#include "mpst/efsm.hpp"

namespace mpst {

class EfsmFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Serializes to the EFSM JSON interchange format:
/// {"protocol", "role", "initial", "terminal", "states":[{"id","kind"}],
///  "transitions":[{"from","to","action","peer","label","payloads"}]}
std::string export_efsm_json(const Efsm& e, int indent = 2);

/// Inverse of export_efsm_json. Throws EfsmFormatError on schema violations.
Efsm import_efsm_json(std::string_view text);

/// Graphviz rendering: one node "S<id>" per state, the terminal state drawn as
/// a double circle, the initial state marked by an arrow from a point node.
std::string export_dot(const Efsm& e);

/// Edge caption used by the DOT export, e.g. "send GameServer: Init(Config)".
std::string describe_transition(const Transition& t);

}  // namespace mpst
