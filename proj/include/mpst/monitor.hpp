#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mpst/efsm.hpp"

namespace mpst {

/// Dynamic conformance check: interprets an EFSM against the frames one
/// endpoint sends and receives. Works on split and unsplit machines alike;
/// a frame matching a label edge also consumes the payload edge behind it.
class EfsmMonitor {
 public:
  explicit EfsmMonitor(Efsm e);

  /// Feeds one frame. Returns false and records a violation when the frame is
  /// not enabled in the current state. After the first violation every later
  /// frame is rejected too. "__accept" frames are handshake acknowledgements
  /// and are ignored.
  bool on_frame(Direction dir, std::string_view peer, std::string_view label);

  /// Lower-level entry point taking an already classified action.
  bool step(Action action, std::string_view peer, std::string_view label);

  StateId state() const { return state_; }
  bool at_terminal() const;
  const std::vector<std::string>& violations() const { return violations_; }
  const Efsm& efsm() const { return e_; }

 private:
  bool fail(std::string msg);

  Efsm e_;
  StateId state_;
  std::vector<std::string> violations_;
};

}  // namespace mpst
