#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "mpst/monitor.hpp"
#include "mpst/parser.hpp"
#include "mpst/projector.hpp"
#include "mpst/rt/channel.hpp"
#include "support/corpus.hpp"

namespace mpst::testing {

inline Efsm split_efsm_of(const ast::ScribbleModule& m, const std::string& protocol,
                          const std::string& role) {
  return split_labels(to_efsm(*project(m, protocol, role), protocol, role));
}

inline Efsm split_efsm_of(const std::filesystem::path& file, const std::string& protocol,
                          const std::string& role) {
  return split_efsm_of(ast::parse_module(read_file(file)), protocol, role);
}

/// Records every frame an endpoint observes and feeds it to a monitor.
class Recorder {
 public:
  explicit Recorder(Efsm e) : monitor_(std::move(e)) {}

  rt::Observer observer() {
    return [this](const rt::FrameEvent& ev) {
      std::lock_guard lock(mu_);
      events_.push_back(ev);
      monitor_.on_frame(ev.direction, ev.peer, ev.label);
    };
  }

  std::vector<rt::FrameEvent> events() const {
    std::lock_guard lock(mu_);
    return events_;
  }
  bool conformant() const {
    std::lock_guard lock(mu_);
    return monitor_.violations().empty() && monitor_.at_terminal();
  }
  std::vector<std::string> violations() const {
    std::lock_guard lock(mu_);
    return monitor_.violations();
  }

  /// One line per frame: direction, peer and the frame text.
  std::string trace() const {
    std::lock_guard lock(mu_);
    std::string out;
    for (const auto& e : events_) {
      out += (e.direction == Direction::outbound ? "> " : "< ") + e.peer + " " + e.label + " " +
             e.frame + "\n";
    }
    return out;
  }

 private:
  mutable std::mutex mu_;
  EfsmMonitor monitor_;
  std::vector<rt::FrameEvent> events_;
};

}  // namespace mpst::testing
