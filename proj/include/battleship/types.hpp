#pragma once

#include <compare>
#include <nlohmann/json.hpp>
#include <vector>

namespace battleship {

struct Location {
  int x = 0;
  int y = 0;

  auto operator<=>(const Location&) const = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Location, x, y)

using Ship = std::vector<Location>;

/// A player's fleet placement.
struct Config {
  std::vector<Ship> ships;

  bool operator==(const Config&) const = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Config, ships)

}  // namespace battleship
