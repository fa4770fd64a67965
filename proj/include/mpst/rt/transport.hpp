#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "mpst/rt/errors.hpp"

namespace mpst::rt {

using Timeout = std::optional<std::chrono::milliseconds>;

/// Reliable, ordered, duplex frame channel. One thread may send while
/// another receives; concurrent senders must be serialized by the caller.
class Connection {
 public:
  virtual ~Connection() = default;

  /// Throws TransportError::closed once either side has closed.
  virtual void send_frame(std::string text) = 0;
  /// Blocks until a frame arrives. Frames already delivered are returned
  /// before a close is reported. Throws TransportError::closed at end of
  /// stream, TransportError::timeout when `timeout` elapses.
  virtual std::string recv_frame(Timeout timeout = std::nullopt) = 0;
  /// Idempotent.
  virtual void close() = 0;
  virtual std::string describe() const = 0;
};

/// An accepted connection together with the first frame it carried.
struct Incoming {
  std::unique_ptr<Connection> conn;
  std::string first_frame;
};

class Listener {
 public:
  virtual ~Listener() = default;

  /// Blocks for the next connection and its first frame. Throws
  /// TransportError::closed after close(), TransportError::timeout when
  /// `timeout` elapses.
  virtual Incoming accept(Timeout timeout = std::nullopt) = 0;
  virtual void close() = 0;
  /// Address a client can dial, with any ephemeral port resolved.
  virtual std::string address() const = 0;
};

/// Two linked in-memory endpoints.
std::pair<std::unique_ptr<Connection>, std::unique_ptr<Connection>> mem_pair();

std::unique_ptr<Listener> mem_listen(std::string_view id);
std::unique_ptr<Connection> mem_dial(std::string_view id);

/// WebSocket transport. `url` is "ws://host:port/path"; a listener bound to
/// port 0 picks a free port.
std::unique_ptr<Listener> ws_listen(std::string_view url);
std::unique_ptr<Connection> ws_dial(std::string_view url);

/// Scheme dispatch: "ws://..." or "mem:<id>".
std::unique_ptr<Listener> listen(std::string_view address);
std::unique_ptr<Connection> dial(std::string_view address);

}  // namespace mpst::rt
