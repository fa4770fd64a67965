#pragma once

#include <mpst/rt/channel.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "battleship/player.hpp"
#include "battleship/rules.hpp"

namespace battleship {

enum class Outcome { won, lost };

/// Plays as P1 (first attacker) against the server at `address`.
Outcome play_p1(Player& player, const std::string& address, mpst::rt::SessionOptions opts = {});
/// Plays as P2 (first defender).
Outcome play_p2(Player& player, const std::string& address, mpst::rt::SessionOptions opts = {});

struct MatchReport {
  /// 1 or 2.
  int winner = 0;
  std::size_t attacks = 0;
  std::size_t repeats = 0;
};

/// A submitted fleet failed validation; the match is abandoned before the
/// first attack and both connections are closed.
class ConfigRejected : public std::runtime_error {
 public:
  ConfigRejected(int player, std::vector<Violation> violations);
  int player;
  std::vector<Violation> violations;
};

struct ServerOptions {
  Grid grid;
  std::vector<int> fleet = classic_fleet();
};

/// Runs the GameServer endpoint for one match: binds the first P1 and P2
/// connections arriving on `listener`, then judges the game.
MatchReport serve_match(mpst::rt::Listener& listener, mpst::rt::SessionOptions opts = {},
                        const ServerOptions& server = {});

}  // namespace battleship
