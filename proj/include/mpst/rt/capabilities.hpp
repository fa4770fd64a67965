#pragma once

#include <algorithm>
#include <cstddef>
#include <string_view>
#include <tuple>
#include <type_traits>

namespace mpst::rt {

/// Compile-time string usable as a template argument.
template <std::size_t N>
struct FixedString {
  char data[N]{};

  constexpr FixedString(const char (&s)[N]) { std::copy_n(s, N, data); }
  constexpr std::string_view view() const { return {data, N - 1}; }
};

enum class CapKind { none, send, receive, select, branch, connect, accept, disconnect, await_disconnect };

/// What a state permits. Generated code specializes this once per state;
/// a state without a specialization permits nothing.
template <class State>
struct Capability {
  static constexpr CapKind kind = CapKind::none;
};

template <class Peer, class Next, class Message>
struct Send {
  static constexpr CapKind kind = CapKind::send;
  using peer = Peer;
  using next = Next;
  using message = Message;
};

template <class Peer, class Next, class Message>
struct Receive {
  static constexpr CapKind kind = CapKind::receive;
  using peer = Peer;
  using next = Next;
  using message = Message;
};

template <class Peer, class Next>
struct Connect {
  static constexpr CapKind kind = CapKind::connect;
  using peer = Peer;
  using next = Next;
};

template <class Peer, class Next>
struct Accept {
  static constexpr CapKind kind = CapKind::accept;
  using peer = Peer;
  using next = Next;
};

template <class Peer, class Next>
struct Disconnect {
  static constexpr CapKind kind = CapKind::disconnect;
  using peer = Peer;
  using next = Next;
};

template <class Peer, class Next>
struct AwaitDisconnect {
  static constexpr CapKind kind = CapKind::await_disconnect;
  using peer = Peer;
  using next = Next;
};

/// Branch or selection table entry: lowercased label and the intermediate
/// state that carries the message.
template <FixedString Key, class State>
struct Entry {
  static constexpr std::string_view key = Key.view();
  using state = State;
};

template <class... Entries>
struct Table {
  static constexpr std::size_t size = sizeof...(Entries);
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  static constexpr std::size_t index_of(std::string_view key) {
    std::size_t i = 0;
    std::size_t found = npos;
    ((Entries::key == key ? (found = i, ++i) : ++i), ...);
    return found;
  }

  template <std::size_t I>
  using state_at = typename std::tuple_element_t<I, std::tuple<Entries...>>::state;

  static constexpr std::string_view key_at(std::size_t i) {
    constexpr std::string_view keys[] = {Entries::key...};
    return keys[i];
  }
};

template <class Peer, class Tbl>
struct Select {
  static constexpr CapKind kind = CapKind::select;
  using peer = Peer;
  using table = Tbl;
};

/// Generated branch capabilities derive from this and add `accepts<H>`
/// (is H the state's handler record) and `fields(h)` (handlers in table
/// order).
template <class Peer, class Tbl>
struct Branch {
  static constexpr CapKind kind = CapKind::branch;
  using peer = Peer;
  using table = Tbl;
};

/// Entry and exit states of a role; specialized by generated code with a
/// member `using state = ...`.
template <class Role>
struct Initial;
template <class Role>
struct Terminal;

template <class T, template <class...> class Tmpl>
struct is_instance : std::false_type {};
template <template <class...> class Tmpl, class... Args>
struct is_instance<Tmpl<Args...>, Tmpl> : std::true_type {};
template <class T, template <class...> class Tmpl>
inline constexpr bool is_instance_v = is_instance<T, Tmpl>::value;

}  // namespace mpst::rt
