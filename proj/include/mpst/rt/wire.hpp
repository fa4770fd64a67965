#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "mpst/rt/errors.hpp"

namespace mpst::rt {

/// The unit on the wire: one text frame holding
/// {"label": <string>, "payload": [<value>, ...]}.
struct WireMessage {
  std::string label;
  nlohmann::json payload = nlohmann::json::array();

  bool operator==(const WireMessage&) const = default;
};

/// Compact encoding with "label" before "payload".
inline std::string encode_frame(const WireMessage& m) {
  return "{\"label\":" + nlohmann::json(m.label).dump() + ",\"payload\":" +
         (m.payload.is_null() ? std::string("[]") : m.payload.dump()) + "}";
}

inline WireMessage decode_frame(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ProtocolError(ProtocolError::Kind::malformed, "frame is not a JSON object");
  }
  auto label = j.find("label");
  auto payload = j.find("payload");
  if (label == j.end() || !label->is_string() || label->get_ref<const std::string&>().empty()) {
    throw ProtocolError(ProtocolError::Kind::malformed, "frame has no label");
  }
  if (payload == j.end() || !payload->is_array()) {
    throw ProtocolError(ProtocolError::Kind::malformed, "frame payload is not an array",
                        label->get<std::string>());
  }
  if (j.size() != 2) {
    throw ProtocolError(ProtocolError::Kind::malformed, "frame has unexpected keys",
                        label->get<std::string>());
  }
  return WireMessage{label->get<std::string>(), std::move(*payload)};
}

/// Decodes payload element `i` as T; arity and conversion failures become
/// ProtocolError::malformed.
template <class T>
T payload_at(const WireMessage& m, std::size_t i) {
  try {
    return m.payload.at(i).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(ProtocolError::Kind::malformed,
                        "payload " + std::to_string(i) + " of '" + m.label + "': " + e.what(),
                        m.label);
  }
}

inline void expect_arity(const WireMessage& m, std::size_t n) {
  if (m.payload.size() != n) {
    throw ProtocolError(ProtocolError::Kind::malformed,
                        "'" + m.label + "' carries " + std::to_string(m.payload.size()) +
                            " payload values, expected " + std::to_string(n),
                        m.label);
  }
}

}  // namespace mpst::rt
