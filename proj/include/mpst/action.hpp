#pragma once

#include <optional>
#include <string_view>

namespace mpst {

enum class Action { send, receive, connect, disconnect };

constexpr std::string_view to_string(Action a) {
  switch (a) {
    case Action::send: return "send";
    case Action::receive: return "receive";
    case Action::connect: return "connect";
    case Action::disconnect: return "disconnect";
  }
  return "?";
}

constexpr std::optional<Action> parse_action(std::string_view s) {
  if (s == "send") return Action::send;
  if (s == "receive") return Action::receive;
  if (s == "connect") return Action::connect;
  if (s == "disconnect") return Action::disconnect;
  return std::nullopt;
}

/// Which way a frame travels, seen from the observing endpoint.
enum class Direction { outbound, inbound };

/// Labels carried by connection-management transitions and frames.
inline constexpr std::string_view kConnectLabel = "__connect";
inline constexpr std::string_view kDisconnectLabel = "__disconnect";
inline constexpr std::string_view kAcceptLabel = "__accept";

}  // namespace mpst
