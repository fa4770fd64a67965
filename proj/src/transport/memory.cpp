#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>

#include "mpst/rt/transport.hpp"

namespace mpst::rt {

namespace {

// One direction of a pair.
struct Pipe {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> frames;
  bool closed = false;
};

class MemConnection final : public Connection {
 public:
  MemConnection(std::shared_ptr<Pipe> in, std::shared_ptr<Pipe> out, std::string name)
      : in_(std::move(in)), out_(std::move(out)), name_(std::move(name)) {}

  ~MemConnection() override { close(); }

  void send_frame(std::string text) override {
    std::lock_guard lock(out_->mu);
    if (out_->closed) throw TransportError(TransportError::Kind::closed, name_ + " is closed");
    out_->frames.push_back(std::move(text));
    out_->cv.notify_all();
  }

  std::string recv_frame(Timeout timeout) override {
    std::unique_lock lock(in_->mu);
    auto ready = [&] { return !in_->frames.empty() || in_->closed; };
    if (timeout) {
      if (!in_->cv.wait_for(lock, *timeout, ready)) {
        throw TransportError(TransportError::Kind::timeout, name_ + ": receive timed out");
      }
    } else {
      in_->cv.wait(lock, ready);
    }
    if (in_->frames.empty()) {
      throw TransportError(TransportError::Kind::closed, name_ + ": peer closed");
    }
    std::string f = std::move(in_->frames.front());
    in_->frames.pop_front();
    return f;
  }

  void close() override {
    // Frames already queued for the peer stay readable.
    for (auto* p : {in_.get(), out_.get()}) {
      std::lock_guard lock(p->mu);
      p->closed = true;
      p->cv.notify_all();
    }
  }

  std::string describe() const override { return name_; }

 private:
  std::shared_ptr<Pipe> in_;
  std::shared_ptr<Pipe> out_;
  std::string name_;
};

class MemListener;

struct Registry {
  std::mutex mu;
  std::map<std::string, MemListener*, std::less<>> listeners;

  static Registry& get() {
    static Registry r;
    return r;
  }
};

class MemListener final : public Listener {
 public:
  explicit MemListener(std::string id) : id_(std::move(id)) {}
  ~MemListener() override { close(); }

  void push(std::unique_ptr<Connection> c) {
    std::lock_guard lock(mu_);
    if (closed_) throw TransportError(TransportError::Kind::refused, "mem:" + id_ + " is closed");
    pending_.push_back(std::move(c));
    cv_.notify_all();
  }

  Incoming accept(Timeout timeout) override {
    std::unique_ptr<Connection> c;
    {
      std::unique_lock lock(mu_);
      auto ready = [&] { return !pending_.empty() || closed_; };
      if (timeout) {
        if (!cv_.wait_for(lock, *timeout, ready)) {
          throw TransportError(TransportError::Kind::timeout, "mem:" + id_ + ": accept timed out");
        }
      } else {
        cv_.wait(lock, ready);
      }
      if (pending_.empty()) throw TransportError(TransportError::Kind::closed, "mem:" + id_ + " closed");
      c = std::move(pending_.front());
      pending_.pop_front();
    }
    std::string first = c->recv_frame(timeout);
    return Incoming{std::move(c), std::move(first)};
  }

  void close() override {
    {
      std::lock_guard lock(Registry::get().mu);
      auto it = Registry::get().listeners.find(id_);
      if (it != Registry::get().listeners.end() && it->second == this) {
        Registry::get().listeners.erase(it);
      }
    }
    std::lock_guard lock(mu_);
    closed_ = true;
    cv_.notify_all();
  }

  std::string address() const override { return "mem:" + id_; }

 private:
  std::string id_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::unique_ptr<Connection>> pending_;
  bool closed_ = false;
};

}  // namespace

std::pair<std::unique_ptr<Connection>, std::unique_ptr<Connection>> mem_pair() {
  auto a = std::make_shared<Pipe>();
  auto b = std::make_shared<Pipe>();
  return {std::make_unique<MemConnection>(a, b, "mem-pair/0"),
          std::make_unique<MemConnection>(b, a, "mem-pair/1")};
}

std::unique_ptr<Listener> mem_listen(std::string_view id) {
  auto l = std::make_unique<MemListener>(std::string(id));
  std::lock_guard lock(Registry::get().mu);
  if (!Registry::get().listeners.emplace(std::string(id), l.get()).second) {
    throw TransportError(TransportError::Kind::refused, "mem:" + std::string(id) + " is in use");
  }
  return l;
}

std::unique_ptr<Connection> mem_dial(std::string_view id) {
  std::lock_guard lock(Registry::get().mu);
  auto it = Registry::get().listeners.find(id);
  if (it == Registry::get().listeners.end()) {
    throw TransportError(TransportError::Kind::refused,
                         "nothing listens on mem:" + std::string(id));
  }
  auto a = std::make_shared<Pipe>();
  auto b = std::make_shared<Pipe>();
  const std::string name = "mem:" + std::string(id);
  it->second->push(std::make_unique<MemConnection>(b, a, name + "/server"));
  return std::make_unique<MemConnection>(a, b, name + "/client");
}

std::unique_ptr<Listener> listen(std::string_view address) {
  if (address.rfind("mem:", 0) == 0) return mem_listen(address.substr(4));
  if (address.rfind("ws://", 0) == 0) return ws_listen(address);
  throw TransportError(TransportError::Kind::refused,
                       "unsupported address '" + std::string(address) + "'");
}

std::unique_ptr<Connection> dial(std::string_view address) {
  if (address.rfind("mem:", 0) == 0) return mem_dial(address.substr(4));
  if (address.rfind("ws://", 0) == 0) return ws_dial(address);
  throw TransportError(TransportError::Kind::refused,
                       "unsupported address '" + std::string(address) + "'");
}

}  // namespace mpst::rt
