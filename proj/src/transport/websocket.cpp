#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <condition_variable>
#include <deque>
#include <future>
#include <mutex>
#include <regex>
#include <thread>

#include "mpst/rt/transport.hpp"

namespace mpst::rt {

namespace {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

struct Url {
  std::string host;
  std::string port;
  std::string path;
};

Url parse_url(std::string_view url) {
  static const std::regex re(R"(^ws://([^:/]+|\[[^\]]+\])(?::(\d+))?(/.*)?$)");
  std::cmatch m;
  if (!std::regex_match(url.begin(), url.end(), m, re)) {
    throw TransportError(TransportError::Kind::refused, "malformed WebSocket URL '" +
                                                            std::string(url) + "'");
  }
  Url u{m[1].str(), m[2].matched ? m[2].str() : "80", m[3].matched ? m[3].str() : "/"};
  if (u.host.size() > 2 && u.host.front() == '[') u.host = u.host.substr(1, u.host.size() - 2);
  return u;
}

using Stream = websocket::stream<tcp::socket>;

// Reads run continuously on a private io_context thread and land in a queue;
// writes and close are posted to that thread and awaited.
class WsConnection final : public Connection {
 public:
  WsConnection(std::unique_ptr<net::io_context> ioc, std::unique_ptr<Stream> ws, std::string name)
      : ioc_(std::move(ioc)), ws_(std::move(ws)), name_(std::move(name)) {
    ws_->text(true);
    guard_.emplace(net::make_work_guard(*ioc_));
    read_loop();
    thread_ = std::thread([this] { ioc_->run(); });
  }

  ~WsConnection() override {
    close();
    guard_.reset();
    ioc_->stop();
    if (thread_.joinable()) thread_.join();
  }

  void send_frame(std::string text) override {
    {
      std::lock_guard lock(mu_);
      if (closed_ || local_closed_) {
        throw TransportError(TransportError::Kind::closed, name_ + " is closed");
      }
    }
    std::promise<beast::error_code> done;
    auto fut = done.get_future();
    auto buf = std::make_shared<std::string>(std::move(text));
    net::post(*ioc_, [this, buf, &done] {
      ws_->async_write(net::buffer(*buf), [buf, &done](beast::error_code ec, std::size_t) {
        done.set_value(ec);
      });
    });
    auto ec = fut.get();
    if (ec) throw TransportError(TransportError::Kind::closed, name_ + ": " + ec.message());
  }

  std::string recv_frame(Timeout timeout) override {
    std::unique_lock lock(mu_);
    auto ready = [&] { return !frames_.empty() || closed_ || local_closed_; };
    if (timeout) {
      if (!cv_.wait_for(lock, *timeout, ready)) {
        throw TransportError(TransportError::Kind::timeout, name_ + ": receive timed out");
      }
    } else {
      cv_.wait(lock, ready);
    }
    if (frames_.empty()) {
      throw TransportError(TransportError::Kind::closed, name_ + ": " + close_reason_);
    }
    auto [binary, f] = std::move(frames_.front());
    frames_.pop_front();
    if (binary) {
      throw ProtocolError(ProtocolError::Kind::binary_frame, name_ + ": binary frame rejected");
    }
    return f;
  }

  void close() override {
    {
      std::lock_guard lock(mu_);
      if (local_closed_) return;
      local_closed_ = true;
      cv_.notify_all();
    }
    std::promise<void> done;
    auto fut = done.get_future();
    net::post(*ioc_, [this, &done] {
      if (!ws_->is_open()) {
        done.set_value();
        return;
      }
      ws_->async_close(websocket::close_code::normal, [this, &done](beast::error_code) {
        beast::error_code ignored;
        ws_->next_layer().shutdown(tcp::socket::shutdown_both, ignored);
        done.set_value();
      });
    });
    if (fut.wait_for(std::chrono::seconds(2)) != std::future_status::ready) {
      net::post(*ioc_, [this] {
        beast::error_code ignored;
        ws_->next_layer().close(ignored);
      });
      fut.wait_for(std::chrono::seconds(2));
    }
  }

  std::string describe() const override { return name_; }

 private:
  void read_loop() {
    ws_->async_read(buffer_, [this](beast::error_code ec, std::size_t) {
      std::lock_guard lock(mu_);
      if (ec) {
        closed_ = true;
        close_reason_ = ec == websocket::error::closed ? "peer closed" : ec.message();
        cv_.notify_all();
        return;
      }
      frames_.emplace_back(!ws_->got_text(), beast::buffers_to_string(buffer_.data()));
      buffer_.consume(buffer_.size());
      cv_.notify_all();
      read_loop();
    });
  }

  std::unique_ptr<net::io_context> ioc_;
  std::unique_ptr<Stream> ws_;
  std::string name_;
  std::optional<net::executor_work_guard<net::io_context::executor_type>> guard_;
  std::thread thread_;
  beast::flat_buffer buffer_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::pair<bool, std::string>> frames_;
  bool closed_ = false;
  bool local_closed_ = false;
  std::string close_reason_ = "closed";
};

class WsListener final : public Listener {
 public:
  explicit WsListener(std::string_view url) : url_(parse_url(url)), acceptor_(ioc_) {
    beast::error_code ec;
    tcp::resolver resolver(ioc_);
    auto results = resolver.resolve(url_.host, url_.port, ec);
    if (ec || results.empty()) {
      throw TransportError(TransportError::Kind::refused, "cannot resolve " + url_.host);
    }
    tcp::endpoint ep = results.begin()->endpoint();
    acceptor_.open(ep.protocol(), ec);
    if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(ep, ec);
    if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
    if (ec) {
      throw TransportError(TransportError::Kind::refused,
                           "cannot listen on " + std::string(url) + ": " + ec.message());
    }
    port_ = acceptor_.local_endpoint().port();
  }

  ~WsListener() override { close(); }

  Incoming accept(Timeout timeout) override {
    const auto deadline = timeout ? std::chrono::steady_clock::now() + *timeout
                                  : std::chrono::steady_clock::time_point::max();
    for (;;) {
      auto conn_ioc = std::make_unique<net::io_context>();
      tcp::socket sock(*conn_ioc);
      std::optional<beast::error_code> result;
      {
        std::lock_guard lock(mu_);
        if (closed_) throw TransportError(TransportError::Kind::closed, "listener closed");
        acceptor_.async_accept(sock, [&](beast::error_code ec) { result = ec; });
      }
      while (!result) {
        ioc_.restart();
        ioc_.run_for(std::chrono::milliseconds(50));
        bool stop = false;
        {
          std::lock_guard lock(mu_);
          stop = closed_;
        }
        if (!result && (stop || std::chrono::steady_clock::now() > deadline)) {
          beast::error_code ignored;
          acceptor_.cancel(ignored);
          ioc_.restart();
          ioc_.run();
          if (stop) throw TransportError(TransportError::Kind::closed, "listener closed");
          throw TransportError(TransportError::Kind::timeout, "accept timed out");
        }
      }
      if (*result) {
        std::lock_guard lock(mu_);
        if (closed_) throw TransportError(TransportError::Kind::closed, "listener closed");
        continue;
      }
      auto ws = std::make_unique<Stream>(std::move(sock));
      try {
        beast::flat_buffer buf;
        http::request<http::string_body> req;
        http::read(ws->next_layer(), buf, req);
        if (!websocket::is_upgrade(req) || req.target() != url_.path) {
          http::response<http::string_body> res{http::status::not_found, req.version()};
          res.set(http::field::content_type, "text/plain");
          res.body() = "no WebSocket endpoint here\n";
          res.prepare_payload();
          http::write(ws->next_layer(), res);
          continue;
        }
        ws->next_layer().set_option(tcp::no_delay(true));
        ws->accept(req);
      } catch (const beast::system_error&) {
        continue;
      }
      const std::string name = "ws-server:" + std::to_string(++accepted_);
      auto c = std::make_unique<WsConnection>(std::move(conn_ioc), std::move(ws), name);
      std::string first;
      try {
        first = c->recv_frame(timeout ? std::optional(std::chrono::duration_cast<std::chrono::milliseconds>(
                                            std::max(deadline - std::chrono::steady_clock::now(),
                                                     std::chrono::steady_clock::duration::zero())))
                                      : std::nullopt);
      } catch (const TransportError& e) {
        if (e.kind() == TransportError::Kind::timeout) throw;
        continue;
      } catch (const ProtocolError&) {
        continue;
      }
      return Incoming{std::move(c), std::move(first)};
    }
  }

  void close() override {
    std::lock_guard lock(mu_);
    if (closed_) return;
    closed_ = true;
  }

  std::string address() const override {
    return "ws://" + url_.host + ":" + std::to_string(port_) + url_.path;
  }

 private:
  Url url_;
  net::io_context ioc_;
  tcp::acceptor acceptor_;
  unsigned short port_ = 0;
  std::mutex mu_;
  bool closed_ = false;
  int accepted_ = 0;
};

}  // namespace

std::unique_ptr<Listener> ws_listen(std::string_view url) {
  return std::make_unique<WsListener>(url);
}

std::unique_ptr<Connection> ws_dial(std::string_view url) {
  Url u = parse_url(url);
  auto ioc = std::make_unique<net::io_context>();
  tcp::resolver resolver(*ioc);
  beast::error_code ec;
  auto results = resolver.resolve(u.host, u.port, ec);
  if (ec) throw TransportError(TransportError::Kind::refused, "cannot resolve " + u.host);
  auto ws = std::make_unique<Stream>(*ioc);
  net::connect(ws->next_layer(), results, ec);
  if (ec) {
    throw TransportError(TransportError::Kind::refused,
                         "cannot connect to " + std::string(url) + ": " + ec.message());
  }
  ws->next_layer().set_option(tcp::no_delay(true), ec);
  ws->handshake(u.host + ":" + u.port, u.path, ec);
  if (ec) {
    throw TransportError(TransportError::Kind::handshake_failed,
                         "WebSocket handshake with " + std::string(url) + " failed: " + ec.message());
  }
  return std::make_unique<WsConnection>(std::move(ioc), std::move(ws), "ws-client:" + std::string(url));
}

}  // namespace mpst::rt
