#include <doctest.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <future>
#include <random>
#include <thread>

#include "Net.PingPong/messages.hpp"
#include "Tests.Session/messages.hpp"
#include "mpst/rt/transport.hpp"
#include "mpst/rt/wire.hpp"
#include "support/transports.hpp"

using namespace mpst::rt;
using nlohmann::json;
namespace msg = Tests::Session::messages;

namespace {

std::string random_text(std::mt19937& rng) {
  static const std::vector<std::string> pieces = {"a",  "Z", "0",  " ",    "\"",   "\\",  "/",
                                                  "\n", "\t", "\x01", "\xc3\xa9", "\xe6\x97\xa5",
                                                  "\xf0\x9f\x9a\xa2", "{", "]", "label"};
  std::string s;
  const int n = std::uniform_int_distribution<int>(0, 12)(rng);
  for (int i = 0; i < n; ++i) {
    s += pieces[std::uniform_int_distribution<std::size_t>(0, pieces.size() - 1)(rng)];
  }
  return s;
}

int random_int(std::mt19937& rng) {
  return std::uniform_int_distribution<int>(std::numeric_limits<int>::min(),
                                            std::numeric_limits<int>::max())(rng);
}

// Independent reading of a frame: parse it and compare with the expected
// label and payload values.
void oracle_check(const std::string& frame, const std::string& label, const json& payload) {
  auto j = json::parse(frame);
  REQUIRE(j.is_object());
  CHECK(j.size() == 2);
  CHECK(j.at("label") == label);
  CHECK(j.at("payload") == payload);
  CHECK(frame.rfind("{\"label\":", 0) == 0);
}

template <class M, class Gen, class Payload, class Same>
void round_trip(std::mt19937& rng, Gen gen, Payload payload, Same same) {
  for (int i = 0; i < 1000; ++i) {
    M m = gen();
    const std::string frame = encode_frame(m.to_wire());
    oracle_check(frame, std::string(M::label), payload(m));
    M back = M::from_wire(decode_frame(frame));
    CHECK(same(m, back));
    CHECK(encode_frame(back.to_wire()) == frame);
  }
  (void)rng;
}

}  // namespace

TEST_CASE("encode then decode is the identity for every label") {
  std::mt19937 rng(7);
  round_trip<msg::Note_Int>(
      rng, [&] { return msg::Note_Int{random_int(rng)}; },
      [](const msg::Note_Int& m) { return json::array({m.int_}); },
      [](const auto& a, const auto& b) { return a.int_ == b.int_; });
  round_trip<msg::Hit_Int_Str>(
      rng, [&] { return msg::Hit_Int_Str{random_int(rng), random_text(rng)}; },
      [](const msg::Hit_Int_Str& m) { return json::array({m.int_, m.str}); },
      [](const auto& a, const auto& b) { return a.int_ == b.int_ && a.str == b.str; });
  round_trip<msg::Miss>(
      rng, [] { return msg::Miss{}; }, [](const msg::Miss&) { return json::array(); },
      [](const auto&, const auto&) { return true; });
  round_trip<msg::Done_Str>(
      rng, [&] { return msg::Done_Str{random_text(rng)}; },
      [](const msg::Done_Str& m) { return json::array({m.str}); },
      [](const auto& a, const auto& b) { return a.str == b.str; });
  round_trip<msg::Item_Int>(
      rng, [&] { return msg::Item_Int{random_int(rng)}; },
      [](const msg::Item_Int& m) { return json::array({m.int_}); },
      [](const auto& a, const auto& b) { return a.int_ == b.int_; });
  round_trip<msg::End>(
      rng, [] { return msg::End{}; }, [](const msg::End&) { return json::array(); },
      [](const auto&, const auto&) { return true; });
  namespace pp = Net::PingPong::messages;
  round_trip<pp::Ping_Int>(
      rng, [&] { return pp::Ping_Int{random_int(rng)}; },
      [](const pp::Ping_Int& m) { return json::array({m.int_}); },
      [](const auto& a, const auto& b) { return a.int_ == b.int_; });
}

TEST_CASE("zero-arity message has an empty payload array") {
  CHECK(encode_frame(msg::Miss{}.to_wire()) == R"({"label":"Miss","payload":[]})");
  CHECK(encode_frame(msg::Hit_Int_Str{3, "x"}.to_wire()) ==
        R"({"label":"Hit","payload":[3,"x"]})");
}

TEST_CASE("malformed frames") {
  auto malformed = [](std::string_view text) {
    try {
      decode_frame(text);
    } catch (const ProtocolError& e) {
      return e.kind() == ProtocolError::Kind::malformed;
    }
    return false;
  };
  CHECK(malformed("not json"));
  CHECK(malformed("[]"));
  CHECK(malformed(R"({"payload":[]})"));
  CHECK(malformed(R"({"label":"","payload":[]})"));
  CHECK(malformed(R"({"label":3,"payload":[]})"));
  CHECK(malformed(R"({"label":"X","payload":{}})"));
  CHECK(malformed(R"({"label":"X"})"));
  CHECK(malformed(R"({"label":"X","payload":[],"extra":1})"));
  CHECK_FALSE(malformed(R"({"payload":[],"label":"X"})"));

  auto payload_error = [](const std::string& frame) {
    try {
      msg::Note_Int::from_wire(decode_frame(frame));
    } catch (const ProtocolError& e) {
      return e.kind() == ProtocolError::Kind::malformed && e.got() == "Note";
    }
    return false;
  };
  CHECK(payload_error(R"({"label":"Note","payload":[]})"));
  CHECK(payload_error(R"({"label":"Note","payload":[1,2]})"));
  CHECK(payload_error(R"({"label":"Note","payload":["one"]})"));
}

TEST_CASE("frames arrive in order in both directions") {
  for (const auto& t : mpst::testing::transports()) {
    CAPTURE(t.name);
    auto p = t.connect();
    constexpr int n = 1000;
    auto pump = [](Connection& out, std::string tag) {
      for (int i = 0; i < n; ++i) out.send_frame(tag + std::to_string(i));
    };
    auto drain = [](Connection& in, std::string tag) {
      for (int i = 0; i < n; ++i) {
        if (in.recv_frame(std::chrono::seconds(10)) != tag + std::to_string(i)) return false;
      }
      return true;
    };
    auto ab = std::async(std::launch::async, pump, std::ref(*p.a), "a");
    auto ba = std::async(std::launch::async, pump, std::ref(*p.b), "b");
    auto at_b = std::async(std::launch::async, drain, std::ref(*p.b), "a");
    auto at_a = std::async(std::launch::async, drain, std::ref(*p.a), "b");
    ab.get();
    ba.get();
    CHECK(at_b.get());
    CHECK(at_a.get());
  }
}

TEST_CASE("ping-pong and close") {
  for (const auto& t : mpst::testing::transports()) {
    CAPTURE(t.name);
    auto p = t.connect();
    p.a->send_frame("x");
    CHECK(p.b->recv_frame(std::chrono::seconds(5)) == "x");
    p.b->send_frame("y");
    CHECK(p.a->recv_frame(std::chrono::seconds(5)) == "y");
    p.b->send_frame("last");
    p.b->close();
    CHECK(p.a->recv_frame(std::chrono::seconds(5)) == "last");
    try {
      p.a->recv_frame(std::chrono::seconds(5));
      FAIL("expected Closed");
    } catch (const TransportError& e) {
      CHECK(e.kind() == TransportError::Kind::closed);
    }
    CHECK_THROWS_AS(p.b->send_frame("z"), TransportError);
  }
}

TEST_CASE("receive timeout") {
  for (const auto& t : mpst::testing::transports()) {
    CAPTURE(t.name);
    auto p = t.connect();
    try {
      p.a->recv_frame(std::chrono::milliseconds(30));
      FAIL("expected timeout");
    } catch (const TransportError& e) {
      CHECK(e.kind() == TransportError::Kind::timeout);
    }
  }
}

TEST_CASE("memory listener") {
  auto l = listen("mem:listener-test");
  CHECK(l->address() == "mem:listener-test");
  CHECK_THROWS_AS(mem_listen("listener-test"), TransportError);
  auto c = dial("mem:listener-test");
  c->send_frame("hello");
  auto in = l->accept(std::chrono::seconds(1));
  CHECK(in.first_frame == "hello");
  l->close();
  try {
    dial("mem:listener-test");
    FAIL("expected Refused");
  } catch (const TransportError& e) {
    CHECK(e.kind() == TransportError::Kind::refused);
  }
  CHECK_THROWS_AS(dial("tcp://x"), TransportError);
}

TEST_CASE("WebSocket dial errors") {
  SUBCASE("nothing listening") {
    std::uint16_t port = 0;
    {
      auto l = ws_listen("ws://127.0.0.1:0/x");
      auto a = l->address();
      port = static_cast<std::uint16_t>(std::stoi(a.substr(a.rfind(':') + 1)));
    }
    try {
      ws_dial("ws://127.0.0.1:" + std::to_string(port) + "/x");
      FAIL("expected Refused");
    } catch (const TransportError& e) {
      CHECK(e.kind() == TransportError::Kind::refused);
    }
  }
  SUBCASE("wrong path") {
    auto l = ws_listen("ws://127.0.0.1:0/right");
    auto addr = l->address();
    auto server = std::async(std::launch::async, [&] {
      try {
        l->accept(std::chrono::milliseconds(800));
      } catch (const TransportError&) {
      }
    });
    try {
      ws_dial(addr.substr(0, addr.rfind('/')) + "/wrong");
      FAIL("expected HandshakeFailed");
    } catch (const TransportError& e) {
      CHECK(e.kind() == TransportError::Kind::handshake_failed);
    }
    server.get();
  }
  SUBCASE("malformed URL") { CHECK_THROWS_AS(ws_dial("ws//nope"), TransportError); }
}

TEST_CASE("WebSocket binary frames are rejected") {
  namespace beast = boost::beast;
  namespace net = boost::asio;
  auto l = ws_listen("ws://127.0.0.1:0/bin");
  auto addr = l->address();
  const auto port = addr.substr(addr.rfind(':') + 1, addr.rfind('/') - addr.rfind(':') - 1);
  auto client = std::async(std::launch::async, [&] {
    net::io_context ioc;
    net::ip::tcp::resolver r(ioc);
    beast::websocket::stream<net::ip::tcp::socket> ws(ioc);
    net::connect(ws.next_layer(), r.resolve("127.0.0.1", port));
    ws.handshake("127.0.0.1:" + port, "/bin");
    ws.text(true);
    ws.write(net::buffer(std::string("first")));
    ws.binary(true);
    ws.write(net::buffer(std::string("\x00\x01", 2)));
    beast::flat_buffer b;
    beast::error_code ec;
    ws.read(b, ec);
  });
  auto in = l->accept(std::chrono::seconds(5));
  CHECK(in.first_frame == "first");
  try {
    in.conn->recv_frame(std::chrono::seconds(5));
    FAIL("expected a binary-frame error");
  } catch (const ProtocolError& e) {
    CHECK(e.kind() == ProtocolError::Kind::binary_frame);
  }
  in.conn->close();
  client.get();
}

TEST_CASE("WebSocket accept honours timeout and close") {
  auto l = ws_listen("ws://127.0.0.1:0/idle");
  try {
    l->accept(std::chrono::milliseconds(60));
    FAIL("expected timeout");
  } catch (const TransportError& e) {
    CHECK(e.kind() == TransportError::Kind::timeout);
  }
  l->close();
  CHECK_THROWS_AS(l->accept(std::chrono::milliseconds(60)), TransportError);
}
