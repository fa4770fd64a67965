#pragma once

#include <array>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "battleship/types.hpp"

namespace battleship {

struct Grid {
  int width = 10;
  int height = 10;

  bool contains(Location l) const { return l.x >= 0 && l.y >= 0 && l.x < width && l.y < height; }
};

/// Ship lengths of the classic fleet: 5, 4, 3, 3, 2.
std::vector<int> classic_fleet();

struct Violation {
  /// OUT_OF_BOUNDS, EMPTY_SHIP, NOT_STRAIGHT, NOT_CONTIGUOUS, OVERLAP or
  /// FLEET_MISMATCH.
  std::string code;
  std::string message;
};

std::vector<Violation> validate_config(const Config& c, const Grid& grid = {},
                                       const std::vector<int>& fleet = classic_fleet());

enum class AttackOutcome { hit, miss, sunk, win };

std::string_view to_string(AttackOutcome o);

class RepeatAttack : public std::runtime_error {
 public:
  explicit RepeatAttack(Location l);
  Location location;
};

/// Judges `loc` against `defender`, given every cell of that board judged so
/// far (hits and misses).
AttackOutcome judge_attack(const Config& defender, const std::set<Location>& judged, Location loc);

/// Both boards and whose turn it is. Player indices are 0 (P1) and 1 (P2).
class MatchState {
 public:
  MatchState(Config p1, Config p2);

  struct Judgement {
    AttackOutcome outcome;
    /// The cell had been judged before; answered as a miss.
    bool repeat = false;
  };

  /// Judges an attack by the current attacker and passes the turn on a miss.
  Judgement attack(Location loc);

  int attacker() const { return attacker_; }
  int defender() const { return 1 - attacker_; }
  const Config& fleet(int player) const { return fleets_[static_cast<std::size_t>(player)]; }
  /// Cells of `player`'s board that have been attacked.
  const std::set<Location>& judged(int player) const { return judged_[static_cast<std::size_t>(player)]; }
  std::optional<int> winner() const { return winner_; }
  std::size_t attacks() const { return attacks_; }

 private:
  std::array<Config, 2> fleets_;
  std::array<std::set<Location>, 2> judged_;
  int attacker_ = 0;
  std::optional<int> winner_;
  std::size_t attacks_ = 0;
};

}  // namespace battleship
