#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "mpst/action.hpp"
#include "mpst/rt/transport.hpp"
#include "mpst/rt/wire.hpp"

namespace mpst::rt {

struct FrameEvent {
  Direction direction;
  std::string peer;
  std::string label;
  std::string frame;
};

using Observer = std::function<void(const FrameEvent&)>;
using Acceptor = std::function<std::unique_ptr<Connection>(std::string_view role)>;

struct SessionOptions {
  /// Applies to every receive; none means wait forever.
  Timeout receive_timeout;
  /// Supplies the already handshaken connection of a peer at an accept step.
  Acceptor acceptor;
  /// Called for every frame sent or received, handshake frames included.
  Observer observer;
  /// Peers connected before the session starts, for protocols that do not
  /// open their own connections.
  std::map<std::string, std::unique_ptr<Connection>> connections;
};

/// Runtime state of one endpoint: the connections to its peers and the
/// frames put back for a branch continuation. Only reachable from inside the
/// session combinators.
class Channel {
 public:
  Channel(std::string protocol, std::string self, SessionOptions opts);
  ~Channel();

  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;

  const std::string& self() const { return self_; }
  const std::string& protocol() const { return protocol_; }

  void send(const std::string& peer, const WireMessage& m);
  WireMessage receive(const std::string& peer);
  /// Puts `m` back so the next receive from `peer` yields it again.
  void unread(const std::string& peer, WireMessage m);

  void connect(const std::string& peer, std::string_view address);
  void accept(const std::string& peer);
  void disconnect(const std::string& peer);
  void await_disconnect(const std::string& peer);

  /// Registers an established connection directly.
  void attach(const std::string& peer, std::unique_ptr<Connection> conn);
  bool connected(const std::string& peer) const { return peers_.count(peer) != 0; }
  void close_all();

 private:
  Connection& conn(const std::string& peer);
  void emit(Direction d, const std::string& peer, const std::string& label,
            const std::string& frame);
  void send_raw(const std::string& peer, Connection& c, const WireMessage& m);
  WireMessage recv_raw(const std::string& peer, Connection& c);

  std::string protocol_;
  std::string self_;
  SessionOptions opts_;
  std::map<std::string, std::unique_ptr<Connection>> peers_;
  std::map<std::string, std::deque<WireMessage>> unread_;
};

/// Server-side role binding: validates "__connect" handshakes and parks each
/// connection until the session reaches the matching accept step.
class RoleBinder {
 public:
  RoleBinder(std::string protocol, std::set<std::string> roles);

  /// Validates the handshake carried by `in`. On success the connection is
  /// parked and its role returned; otherwise the connection is closed and
  /// ProtocolError::handshake_rejected thrown.
  std::string offer(Incoming in);

  /// Blocks until `role` has been offered; then hands the connection out.
  std::unique_ptr<Connection> take(std::string_view role, Timeout timeout = std::nullopt);

  bool has(std::string_view role) const;
  /// True once every role has been offered.
  bool all_bound() const;
  Acceptor acceptor();

 private:
  std::string protocol_;
  std::set<std::string> roles_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, std::unique_ptr<Connection>, std::less<>> parked_;
  std::set<std::string> bound_;
};

/// Builds the handshake frame a dialing endpoint sends first.
WireMessage connect_request(std::string_view protocol, std::string_view role);

}  // namespace mpst::rt
