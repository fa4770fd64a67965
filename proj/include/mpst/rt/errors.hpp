#pragma once

#include <stdexcept>
#include <string>

namespace mpst::rt {

class TransportError : public std::runtime_error {
 public:
  enum class Kind {
    refused,
    handshake_failed,
    closed,
    already_connected,
    disconnect_unknown_peer,
    timeout,
  };

  TransportError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class ProtocolError : public std::runtime_error {
 public:
  enum class Kind {
    unexpected_label,
    malformed,
    unknown_branch_label,
    handshake_rejected,
    binary_frame,
  };

  ProtocolError(Kind kind, const std::string& message, std::string got = {},
                std::string expected = {})
      : std::runtime_error(message),
        kind_(kind),
        got_(std::move(got)),
        expected_(std::move(expected)) {}

  Kind kind() const { return kind_; }
  /// Offending label, when the error is about one.
  const std::string& got() const { return got_; }
  const std::string& expected() const { return expected_; }

 private:
  Kind kind_;
  std::string got_;
  std::string expected_;
};

}  // namespace mpst::rt
