#include "mpst/rt/channel.hpp"

#include <spdlog/spdlog.h>

namespace mpst::rt {

WireMessage connect_request(std::string_view protocol, std::string_view role) {
  return WireMessage{std::string(kConnectLabel),
                     nlohmann::json::array({{{"protocol", protocol}, {"role", role}}})};
}

Channel::Channel(std::string protocol, std::string self, SessionOptions opts)
    : protocol_(std::move(protocol)),
      self_(std::move(self)),
      opts_(std::move(opts)),
      peers_(std::move(opts_.connections)) {}

Channel::~Channel() { close_all(); }

void Channel::emit(Direction d, const std::string& peer, const std::string& label,
                   const std::string& frame) {
  if (opts_.observer) opts_.observer(FrameEvent{d, peer, label, frame});
}

Connection& Channel::conn(const std::string& peer) {
  auto it = peers_.find(peer);
  if (it == peers_.end()) {
    throw TransportError(TransportError::Kind::closed,
                         self_ + " has no connection to " + peer);
  }
  return *it->second;
}

void Channel::send_raw(const std::string& peer, Connection& c, const WireMessage& m) {
  std::string frame = encode_frame(m);
  spdlog::debug("{} -> {}: {}", self_, peer, frame);
  c.send_frame(frame);
  emit(Direction::outbound, peer, m.label, frame);
}

WireMessage Channel::recv_raw(const std::string& peer, Connection& c) {
  std::string frame = c.recv_frame(opts_.receive_timeout);
  spdlog::debug("{} <- {}: {}", self_, peer, frame);
  WireMessage m = decode_frame(frame);
  emit(Direction::inbound, peer, m.label, frame);
  return m;
}

void Channel::send(const std::string& peer, const WireMessage& m) { send_raw(peer, conn(peer), m); }

WireMessage Channel::receive(const std::string& peer) {
  auto q = unread_.find(peer);
  if (q != unread_.end() && !q->second.empty()) {
    WireMessage m = std::move(q->second.front());
    q->second.pop_front();
    return m;
  }
  return recv_raw(peer, conn(peer));
}

void Channel::unread(const std::string& peer, WireMessage m) {
  unread_[peer].push_front(std::move(m));
}

void Channel::attach(const std::string& peer, std::unique_ptr<Connection> c) {
  if (peers_.count(peer)) {
    c->close();
    throw TransportError(TransportError::Kind::already_connected,
                         self_ + " is already connected to " + peer);
  }
  peers_.emplace(peer, std::move(c));
}

void Channel::connect(const std::string& peer, std::string_view address) {
  if (peers_.count(peer)) {
    throw TransportError(TransportError::Kind::already_connected,
                         self_ + " is already connected to " + peer);
  }
  auto c = dial(address);
  send_raw(peer, *c, connect_request(protocol_, self_));
  WireMessage reply;
  try {
    reply = recv_raw(peer, *c);
  } catch (const TransportError& e) {
    if (e.kind() != TransportError::Kind::closed) throw;
    throw ProtocolError(ProtocolError::Kind::handshake_rejected,
                        peer + " at " + std::string(address) + " rejected the handshake");
  }
  if (reply.label != kAcceptLabel) {
    c->close();
    throw ProtocolError(ProtocolError::Kind::handshake_rejected,
                        "expected '__accept' from " + peer, reply.label, std::string(kAcceptLabel));
  }
  peers_.emplace(peer, std::move(c));
}

void Channel::accept(const std::string& peer) {
  if (peers_.count(peer)) {
    throw TransportError(TransportError::Kind::already_connected,
                         self_ + " is already connected to " + peer);
  }
  if (!opts_.acceptor) {
    throw TransportError(TransportError::Kind::refused,
                         self_ + " has no acceptor configured for " + peer);
  }
  auto c = opts_.acceptor(peer);
  if (!c) {
    throw TransportError(TransportError::Kind::refused, "no connection for role " + peer);
  }
  // The handshake frame itself was consumed by the binder.
  emit(Direction::inbound, peer, std::string(kConnectLabel), {});
  send_raw(peer, *c, WireMessage{std::string(kAcceptLabel), nlohmann::json::array()});
  peers_.emplace(peer, std::move(c));
}

void Channel::disconnect(const std::string& peer) {
  auto it = peers_.find(peer);
  if (it == peers_.end()) {
    throw TransportError(TransportError::Kind::disconnect_unknown_peer,
                         self_ + " is not connected to " + peer);
  }
  send_raw(peer, *it->second, WireMessage{std::string(kDisconnectLabel), nlohmann::json::array()});
  it->second->close();
  peers_.erase(it);
  unread_.erase(peer);
}

void Channel::await_disconnect(const std::string& peer) {
  auto it = peers_.find(peer);
  if (it == peers_.end()) {
    throw TransportError(TransportError::Kind::disconnect_unknown_peer,
                         self_ + " is not connected to " + peer);
  }
  WireMessage m = receive(peer);
  if (m.label != kDisconnectLabel) {
    throw ProtocolError(ProtocolError::Kind::unexpected_label,
                        "expected '__disconnect' from " + peer + ", got '" + m.label + "'", m.label,
                        std::string(kDisconnectLabel));
  }
  it->second->close();
  peers_.erase(it);
  unread_.erase(peer);
}

void Channel::close_all() {
  for (auto& [peer, c] : peers_) {
    try {
      c->close();
    } catch (const std::exception& e) {
      spdlog::debug("closing {}: {}", peer, e.what());
    }
  }
  peers_.clear();
  unread_.clear();
}

RoleBinder::RoleBinder(std::string protocol, std::set<std::string> roles)
    : protocol_(std::move(protocol)), roles_(std::move(roles)) {}

std::string RoleBinder::offer(Incoming in) {
  auto reject = [&](const std::string& why, const std::string& got = {}) -> std::string {
    spdlog::warn("rejecting {}: {}", in.conn ? in.conn->describe() : "connection", why);
    if (in.conn) in.conn->close();
    throw ProtocolError(ProtocolError::Kind::handshake_rejected, why, got);
  };
  WireMessage m;
  try {
    m = decode_frame(in.first_frame);
  } catch (const ProtocolError& e) {
    return reject(std::string("bad handshake frame: ") + e.what());
  }
  if (m.label != kConnectLabel) return reject("first frame is '" + m.label + "'", m.label);
  if (m.payload.size() != 1 || !m.payload[0].is_object()) return reject("malformed handshake");
  const auto& h = m.payload[0];
  if (!h.contains("protocol") || !h["protocol"].is_string() || !h.contains("role") ||
      !h["role"].is_string()) {
    return reject("malformed handshake");
  }
  const auto protocol = h["protocol"].get<std::string>();
  const auto role = h["role"].get<std::string>();
  if (protocol != protocol_) return reject("unknown protocol '" + protocol + "'", protocol);
  std::lock_guard lock(mu_);
  if (!roles_.count(role)) return reject("role '" + role + "' is not accepted here", role);
  if (bound_.count(role)) return reject("role '" + role + "' is already taken", role);
  bound_.insert(role);
  parked_.emplace(role, std::move(in.conn));
  cv_.notify_all();
  return role;
}

bool RoleBinder::has(std::string_view role) const {
  std::lock_guard lock(mu_);
  return parked_.find(role) != parked_.end();
}

bool RoleBinder::all_bound() const {
  std::lock_guard lock(mu_);
  return bound_ == roles_;
}

std::unique_ptr<Connection> RoleBinder::take(std::string_view role, Timeout timeout) {
  std::unique_lock lock(mu_);
  auto ready = [&] { return parked_.find(role) != parked_.end(); };
  if (timeout) {
    if (!cv_.wait_for(lock, *timeout, ready)) {
      throw TransportError(TransportError::Kind::timeout,
                           "no connection for role " + std::string(role));
    }
  } else {
    cv_.wait(lock, ready);
  }
  auto it = parked_.find(role);
  auto c = std::move(it->second);
  parked_.erase(it);
  return c;
}

Acceptor RoleBinder::acceptor() {
  return [this](std::string_view role) { return take(role); };
}

}  // namespace mpst::rt
