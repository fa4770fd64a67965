#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>

#include "battleship/rules.hpp"

namespace battleship {

/// Application side of a player endpoint. The session programs call these
/// between protocol steps.
class Player {
 public:
  virtual ~Player() = default;

  virtual Config fleet() = 0;
  virtual Location next_attack() = 0;
  /// The server's verdict on our attack at `at`.
  virtual void attack_result(Location at, AttackOutcome outcome) = 0;
  /// The opponent attacked `at`.
  virtual void attacked(Location at, bool hit) = 0;
  virtual void finished(bool won) = 0;
};

/// Random fleet placement that satisfies validate_config.
Config random_fleet(std::mt19937& rng, const Grid& grid = {},
                    const std::vector<int>& fleet = classic_fleet());

/// What one player knows: its own fleet, the opponent's shots and its own
/// shots with their verdicts.
struct Boards {
  Grid grid;
  Config own;
  std::map<Location, bool> incoming;
  std::map<Location, AttackOutcome> outgoing;

  void record_attack(Location at, AttackOutcome o) { outgoing[at] = o; }
  void record_incoming(Location at, bool hit) { incoming[at] = hit; }
};

/// Own board (ships '#', hits 'X', misses 'o') beside the tracking board
/// (hits 'X', misses 'o', unknown '.').
std::string render_boards(const Boards& b);

/// Deterministic computer player: random placement, then random shots with
/// follow-up around hits.
class Bot final : public Player {
 public:
  explicit Bot(std::uint32_t seed, Grid grid = {});

  Config fleet() override;
  Location next_attack() override;
  void attack_result(Location at, AttackOutcome outcome) override;
  void attacked(Location at, bool hit) override;
  void finished(bool won) override { won_ = won; }

  std::optional<bool> won() const { return won_; }
  const Boards& boards() const { return boards_; }

 private:
  std::mt19937 rng_;
  Boards boards_;
  std::set<Location> tried_;
  std::deque<Location> targets_;
  std::optional<bool> won_;
};

/// Human player on a text stream: reads "attack x y" lines and draws the
/// boards between steps.
class TerminalPlayer final : public Player {
 public:
  TerminalPlayer(std::istream& in, std::ostream& out, std::uint32_t seed, Grid grid = {});

  Config fleet() override;
  Location next_attack() override;
  void attack_result(Location at, AttackOutcome outcome) override;
  void attacked(Location at, bool hit) override;
  void finished(bool won) override;

 private:
  std::istream& in_;
  std::ostream& out_;
  std::mt19937 rng_;
  Boards boards_;
};

}  // namespace battleship
