#pragma once

#include <array>
#include <cctype>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>

#include "mpst/rt/capabilities.hpp"
#include "mpst/rt/channel.hpp"

namespace mpst::rt {

/// Result of steps that produce no value.
struct Unit {
  bool operator==(const Unit&) const = default;
};

template <class From, class To, class A>
class Session;

namespace detail {

template <class A>
struct Step;
template <class A>
using Run = std::function<Step<A>(Channel&)>;

// A run either finishes with a value or hands back the rest of the work, so
// long protocol loops execute in constant stack depth.
template <class A>
struct Step {
  std::optional<A> value;
  Run<A> next;
};

template <class A>
Step<A> done(A v) {
  return Step<A>{std::move(v), {}};
}

template <class A>
Step<A> more(Run<A> r) {
  return Step<A>{std::nullopt, std::move(r)};
}

template <class A, class B, class K>
Run<B> bind_run(Run<A> m, K k) {
  return [m = std::move(m), k = std::move(k)](Channel& ch) -> Step<B> {
    Step<A> s = m(ch);
    if (s.value) return more<B>(k(std::move(*s.value)));
    return more<B>(bind_run<A, B>(std::move(s.next), k));
  };
}

template <class A>
A drive(Run<A> r, Channel& ch) {
  Step<A> s = r(ch);
  while (!s.value) {
    Run<A> next = std::move(s.next);
    s = next(ch);
  }
  return std::move(*s.value);
}

struct access {
  template <class From, class To, class A>
  static Session<From, To, A> make(Run<A> r) {
    return Session<From, To, A>(std::move(r));
  }
  template <class From, class To, class A>
  static const Run<A>& run(const Session<From, To, A>& s) {
    return s.run_;
  }
};

template <class>
inline constexpr bool always_false = false;

template <class T>
using lift_result_t = std::conditional_t<std::is_void_v<T>, Unit, T>;

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

template <class M>
M decode_as(const WireMessage& w) {
  if (lowercase(w.label) != M::key) {
    throw ProtocolError(ProtocolError::Kind::unexpected_label,
                        "expected '" + std::string(M::label) + "', got '" + w.label + "'", w.label,
                        std::string(M::label));
  }
  return M::from_wire(w);
}

template <class S, class P>
using resolved_t = decltype(std::declval<P>().template at<S>());

}  // namespace detail

/// Anything that can be placed at a protocol state: the combinators below and
/// Session itself.
template <class P>
concept Program = requires { typename std::decay_t<P>::mpst_program; };

/// A protocol fragment taking the endpoint from state `From` to state `To`
/// and producing an `A`. Built only from the combinators; the channel it
/// runs on is never exposed.
template <class From, class To, class A>
class Session {
 public:
  using from = From;
  using to = To;
  using result = A;
  using mpst_program = void;

  /// Places a program at `From`. It must end in `To` with result `A`.
  template <Program P>
    requires(!std::is_same_v<std::decay_t<P>, Session>)
  Session(P p) : run_(convert(std::move(p))) {}

  template <class S>
  Session at() const {
    static_assert(std::is_same_v<S, From>,
                  "mpst: session starts in a different state than the current one");
    return *this;
  }

 private:
  explicit Session(detail::Run<A> r) : run_(std::move(r)) {}

  template <class P>
  static detail::Run<A> convert(P p) {
    auto s = std::move(p).template at<From>();
    using R = decltype(s);
    static_assert(std::is_same_v<typename R::to, To>,
                  "mpst: session ends in a different state than declared");
    static_assert(std::is_same_v<typename R::result, A>,
                  "mpst: session produces a different result type than declared");
    return detail::access::run(s);
  }

  detail::Run<A> run_;

  friend struct detail::access;
  template <class, class, class>
  friend class Session;
};

// ---------------------------------------------------------------------------
// Combinators. Each is a value whose `at<S>()` checks the capability of S and
// yields the corresponding Session.

template <class M>
struct SendStep {
  using mpst_program = void;
  M msg;

  template <class S>
  auto at() const {
    using C = Capability<S>;
    if constexpr (C::kind == CapKind::send) {
      static_assert(std::is_same_v<typename C::message, M>,
                    "mpst: payload type does not match the send capability of this state");
      return detail::access::make<S, typename C::next, Unit>(
          [msg = msg](Channel& ch) {
            ch.send(std::string(C::peer::name), msg.to_wire());
            return detail::done(Unit{});
          });
    } else if constexpr (C::kind == CapKind::select) {
      using Tbl = typename C::table;
      constexpr std::size_t i = Tbl::index_of(M::key);
      static_assert(i != Tbl::npos, "mpst: label is not offered by this selection");
      if constexpr (i != Tbl::npos) {
        using T = typename Tbl::template state_at<i>;
        using CT = Capability<T>;
        static_assert(std::is_same_v<typename CT::message, M>,
                      "mpst: payload type does not match the send capability of this state");
        return detail::access::make<S, typename CT::next, Unit>(
            [msg = msg](Channel& ch) {
              ch.send(std::string(C::peer::name), msg.to_wire());
              return detail::done(Unit{});
            });
      }
    } else {
      static_assert(detail::always_false<S>, "mpst: no send is possible in this state");
    }
  }
};

struct ReceiveStep {
  using mpst_program = void;

  template <class S>
  auto at() const {
    using C = Capability<S>;
    if constexpr (C::kind == CapKind::receive) {
      using M = typename C::message;
      return detail::access::make<S, typename C::next, M>([](Channel& ch) {
        return detail::done(detail::decode_as<M>(ch.receive(std::string(C::peer::name))));
      });
    } else if constexpr (C::kind == CapKind::branch) {
      static_assert(detail::always_false<S>,
                    "mpst: this state branches on the received label; use choice");
    } else {
      static_assert(detail::always_false<S>, "mpst: no receive is possible in this state");
    }
  }
};

template <class Peer>
struct ConnectStep {
  using mpst_program = void;
  std::string address;

  template <class S>
  auto at() const {
    using C = Capability<S>;
    if constexpr (C::kind == CapKind::connect) {
      static_assert(std::is_same_v<typename C::peer, Peer>,
                    "mpst: no connect to this peer is possible in this state");
      return detail::access::make<S, typename C::next, Unit>([address = address](Channel& ch) {
        ch.connect(std::string(Peer::name), address);
        return detail::done(Unit{});
      });
    } else {
      static_assert(detail::always_false<S>, "mpst: no connect is possible in this state");
    }
  }
};

template <class Peer>
struct AcceptStep {
  using mpst_program = void;

  template <class S>
  auto at() const {
    using C = Capability<S>;
    if constexpr (C::kind == CapKind::accept) {
      static_assert(std::is_same_v<typename C::peer, Peer>,
                    "mpst: no accept from this peer is possible in this state");
      return detail::access::make<S, typename C::next, Unit>([](Channel& ch) {
        ch.accept(std::string(Peer::name));
        return detail::done(Unit{});
      });
    } else {
      static_assert(detail::always_false<S>, "mpst: no accept is possible in this state");
    }
  }
};

template <class Peer>
struct DisconnectStep {
  using mpst_program = void;

  template <class S>
  auto at() const {
    using C = Capability<S>;
    if constexpr (C::kind == CapKind::disconnect || C::kind == CapKind::await_disconnect) {
      static_assert(std::is_same_v<typename C::peer, Peer>,
                    "mpst: no disconnect from this peer is possible in this state");
      return detail::access::make<S, typename C::next, Unit>([](Channel& ch) {
        if constexpr (C::kind == CapKind::disconnect) {
          ch.disconnect(std::string(Peer::name));
        } else {
          ch.await_disconnect(std::string(Peer::name));
        }
        return detail::done(Unit{});
      });
    } else {
      static_assert(detail::always_false<S>, "mpst: no disconnect is possible in this state");
    }
  }
};

template <class H>
struct ChoiceStep {
  using mpst_program = void;
  H handlers;

  template <class S>
  auto at() const {
    using C = Capability<S>;
    if constexpr (C::kind == CapKind::branch) {
      static_assert(C::template accepts<H>,
                    "mpst: handler record does not belong to this branch state");
      return resolve<S, C>(std::make_index_sequence<C::table::size>{});
    } else {
      static_assert(detail::always_false<S>, "mpst: choice is only possible at a branch state");
    }
  }

 private:
  template <class S, class C, std::size_t... I>
  auto resolve(std::index_sequence<I...>) const {
    using Tbl = typename C::table;
    auto fields = C::fields(handlers);
    auto sessions =
        std::make_tuple(std::get<I>(fields).template at<typename Tbl::template state_at<I>>()...);
    using First = std::tuple_element_t<0, decltype(sessions)>;
    using U = typename First::to;
    using A = typename First::result;
    static_assert((std::is_same_v<typename std::tuple_element_t<I, decltype(sessions)>::to, U> && ...),
                  "mpst: branches of a choice end in different states");
    static_assert(
        (std::is_same_v<typename std::tuple_element_t<I, decltype(sessions)>::result, A> && ...),
        "mpst: branches of a choice produce different result types");
    std::array<detail::Run<A>, Tbl::size> runs{detail::access::run(std::get<I>(sessions))...};
    return detail::access::make<S, U, A>([runs](Channel& ch) -> detail::Step<A> {
      const std::string peer(C::peer::name);
      WireMessage m = ch.receive(peer);
      const std::string key = detail::lowercase(m.label);
      for (std::size_t i = 0; i < Tbl::size; ++i) {
        if (Tbl::key_at(i) == key) {
          ch.unread(peer, std::move(m));
          return detail::more<A>(runs[i]);
        }
      }
      throw ProtocolError(ProtocolError::Kind::unknown_branch_label,
                          "'" + m.label + "' is not a branch offered by " + peer, m.label);
    });
  }
};

template <class F>
struct LiftStep {
  using mpst_program = void;
  F fn;

  template <class S>
  auto at() const {
    using R = detail::lift_result_t<std::invoke_result_t<const F&>>;
    return detail::access::make<S, S, R>([fn = fn](Channel&) {
      if constexpr (std::is_void_v<std::invoke_result_t<const F&>>) {
        fn();
        return detail::done(Unit{});
      } else {
        return detail::done<R>(fn());
      }
    });
  }
};

template <class V>
struct PureStep {
  using mpst_program = void;
  V value;

  template <class S>
  auto at() const {
    return detail::access::make<S, S, V>([value = value](Channel&) { return detail::done(value); });
  }
};

template <class F>
struct DeferStep {
  using mpst_program = void;
  F fn;

  template <class S>
  auto at() const {
    using P = std::invoke_result_t<const F&>;
    using R = detail::resolved_t<S, P>;
    using A = typename R::result;
    return detail::access::make<S, typename R::to, A>([fn = fn](Channel&) {
      auto s = fn().template at<S>();
      return detail::more<A>(detail::access::run(s));
    });
  }
};

template <class P, class F>
struct BindStep {
  using mpst_program = void;
  P first;
  F fn;

  template <class S>
  auto at() const {
    auto sp = first.template at<S>();
    using SP = decltype(sp);
    using T = typename SP::to;
    using A = typename SP::result;
    if constexpr (std::is_invocable_v<const F&, A>) {
      using Q = std::invoke_result_t<const F&, A>;
      static_assert(Program<Q>, "mpst: the continuation must return a session program");
      using SQ = detail::resolved_t<T, Q>;
      using B = typename SQ::result;
      return detail::access::make<S, typename SQ::to, B>(detail::bind_run<A, B>(
          detail::access::run(sp), [fn = fn](A a) { return detail::access::run(fn(std::move(a)).template at<T>()); }));
    } else {
      static_assert(std::is_same_v<A, Unit> && std::is_invocable_v<const F&>,
                    "mpst: the continuation does not accept the value produced by the session");
      using Q = std::invoke_result_t<const F&>;
      using SQ = detail::resolved_t<T, Q>;
      using B = typename SQ::result;
      return detail::access::make<S, typename SQ::to, B>(detail::bind_run<A, B>(
          detail::access::run(sp), [fn = fn](A) { return detail::access::run(fn().template at<T>()); }));
    }
  }
};

template <class P, class Q>
struct ThenStep {
  using mpst_program = void;
  P first;
  Q second;

  template <class S>
  auto at() const {
    auto sp = first.template at<S>();
    using SP = decltype(sp);
    using T = typename SP::to;
    using A = typename SP::result;
    auto sq = second.template at<T>();
    using SQ = decltype(sq);
    using B = typename SQ::result;
    return detail::access::make<S, typename SQ::to, B>(
        detail::bind_run<A, B>(detail::access::run(sp), [rq = detail::access::run(sq)](A) { return rq; }));
  }
};

/// Sends `msg` to the peer of the current state. At a selection state the
/// message's label picks the branch.
template <class M>
SendStep<M> send(M msg) {
  return {std::move(msg)};
}

/// Receives the message the current state expects.
inline ReceiveStep receive() { return {}; }

/// Offers a handler record, one continuation per label of the branch state.
template <class H>
ChoiceStep<H> choice(H handlers) {
  return {std::move(handlers)};
}

template <class Peer>
ConnectStep<Peer> connect(std::string address) {
  return {std::move(address)};
}

template <class Peer>
AcceptStep<Peer> accept() {
  return {};
}

template <class Peer>
DisconnectStep<Peer> disconnect() {
  return {};
}

/// Runs a local effect without changing the protocol state.
template <class F>
LiftStep<F> lift(F fn) {
  return {std::move(fn)};
}

template <class V>
PureStep<V> pure(V value) {
  return {std::move(value)};
}

inline PureStep<Unit> done() { return {Unit{}}; }

/// Builds the program only when it runs; needed for recursion.
template <class F>
DeferStep<F> defer(F fn) {
  return {std::move(fn)};
}

template <Program P, class F>
BindStep<P, F> bind(P p, F f) {
  return {std::move(p), std::move(f)};
}

template <Program P, Program Q>
ThenStep<P, Q> then(P p, Q q) {
  return {std::move(p), std::move(q)};
}

template <Program P, Program Q>
ThenStep<P, Q> operator>>(P p, Q q) {
  return {std::move(p), std::move(q)};
}

template <Program P, class F>
  requires(!Program<F>)
BindStep<P, F> operator>>=(P p, F f) {
  return {std::move(p), std::move(f)};
}

// ---------------------------------------------------------------------------
// Running.

/// Runs `program` as `Role` from its initial to its terminal state and
/// returns the program's result. All connections are closed afterwards.
template <class Role, Program P>
auto run_session(SessionOptions opts, P program) {
  using S0 = typename Initial<Role>::state;
  using ST = typename Terminal<Role>::state;
  auto s = std::move(program).template at<S0>();
  using R = decltype(s);
  static_assert(std::is_same_v<typename R::to, ST>,
                "mpst: session does not end in the terminal state");
  Channel ch(std::string(Role::protocol), std::string(Role::name), std::move(opts));
  try {
    auto v = detail::drive(detail::access::run(s), ch);
    ch.close_all();
    return v;
  } catch (...) {
    ch.close_all();
    throw;
  }
}

/// Asynchronous form of run_session.
template <class Role, Program P>
auto session(SessionOptions opts, P program) {
  return std::async(std::launch::async, [opts = std::move(opts), program = std::move(program)]() mutable {
    return run_session<Role>(std::move(opts), std::move(program));
  });
}

}  // namespace mpst::rt
