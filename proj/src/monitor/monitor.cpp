#include "mpst/monitor.hpp"

#include "mpst/efsm_io.hpp"

namespace mpst {

EfsmMonitor::EfsmMonitor(Efsm e) : e_(std::move(e)), state_(e_.initial) {}

bool EfsmMonitor::at_terminal() const {
  return e_.outgoing(state_).empty() && violations_.empty();
}

bool EfsmMonitor::fail(std::string msg) {
  violations_.push_back(std::move(msg));
  return false;
}

bool EfsmMonitor::on_frame(Direction dir, std::string_view peer, std::string_view label) {
  if (label == kAcceptLabel) return violations_.empty();
  Action a = dir == Direction::outbound ? Action::send : Action::receive;
  if (label == kConnectLabel) a = Action::connect;
  if (label == kDisconnectLabel) a = Action::disconnect;
  return step(a, peer, label);
}

bool EfsmMonitor::step(Action action, std::string_view peer, std::string_view label) {
  if (!violations_.empty()) return false;
  const std::string key = branch_key(label);
  for (const auto* t : e_.outgoing(state_)) {
    if (t->action != action || t->peer != peer || branch_key(t->label) != key) continue;
    if (is_label_edge(e_, *t)) {
      state_ = e_.outgoing(t->to).front()->to;
    } else {
      state_ = t->to;
    }
    return true;
  }
  std::string enabled;
  for (const auto* t : e_.outgoing(state_)) {
    if (!enabled.empty()) enabled += ", ";
    enabled += describe_transition(*t);
  }
  return fail(e_.role + "@S" + std::to_string(state_) + ": " + std::string(to_string(action)) +
              " " + std::string(peer) + ": " + std::string(label) + " not enabled (enabled: " +
              (enabled.empty() ? "none" : enabled) + ")");
}

}  // namespace mpst
