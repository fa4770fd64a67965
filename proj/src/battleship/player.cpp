#include "battleship/player.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace battleship {

Config random_fleet(std::mt19937& rng, const Grid& grid, const std::vector<int>& fleet) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Config c;
    std::set<Location> used;
    bool ok = true;
    for (int len : fleet) {
      bool placed = false;
      for (int tries = 0; tries < 200 && !placed; ++tries) {
        const bool horizontal = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
        const int max_x = horizontal ? grid.width - len : grid.width - 1;
        const int max_y = horizontal ? grid.height - 1 : grid.height - len;
        if (max_x < 0 || max_y < 0) break;
        const int x = std::uniform_int_distribution<int>(0, max_x)(rng);
        const int y = std::uniform_int_distribution<int>(0, max_y)(rng);
        Ship s;
        for (int k = 0; k < len; ++k) s.push_back(horizontal ? Location{x + k, y} : Location{x, y + k});
        if (std::any_of(s.begin(), s.end(), [&](Location l) { return used.count(l) != 0; })) continue;
        used.insert(s.begin(), s.end());
        c.ships.push_back(std::move(s));
        placed = true;
      }
      if (!placed) {
        ok = false;
        break;
      }
    }
    if (ok) return c;
  }
  throw std::runtime_error("fleet does not fit on the grid");
}

std::string render_boards(const Boards& b) {
  std::set<Location> ships;
  for (const auto& s : b.own.ships) ships.insert(s.begin(), s.end());
  std::ostringstream o;
  auto header = [&] {
    o << "   ";
    for (int x = 0; x < b.grid.width; ++x) o << x % 10;
  };
  o << "own" << std::string(static_cast<std::size_t>(b.grid.width) + 3, ' ') << "opponent\n";
  header();
  o << "   ";
  header();
  o << "\n";
  for (int y = 0; y < b.grid.height; ++y) {
    o << (y < 10 ? " " : "") << y << " ";
    for (int x = 0; x < b.grid.width; ++x) {
      const Location l{x, y};
      auto in = b.incoming.find(l);
      char c = ships.count(l) ? '#' : '.';
      if (in != b.incoming.end()) c = in->second ? 'X' : 'o';
      o << c;
    }
    o << "   " << (y < 10 ? " " : "") << y << " ";
    for (int x = 0; x < b.grid.width; ++x) {
      auto out = b.outgoing.find({x, y});
      char c = '.';
      if (out != b.outgoing.end()) c = out->second == AttackOutcome::miss ? 'o' : 'X';
      o << c;
    }
    o << "\n";
  }
  return o.str();
}

Bot::Bot(std::uint32_t seed, Grid grid) : rng_(seed) { boards_.grid = grid; }

Config Bot::fleet() {
  boards_.own = random_fleet(rng_, boards_.grid);
  return boards_.own;
}

Location Bot::next_attack() {
  while (!targets_.empty()) {
    Location l = targets_.front();
    targets_.pop_front();
    if (boards_.grid.contains(l) && !tried_.count(l)) {
      tried_.insert(l);
      return l;
    }
  }
  std::vector<Location> open;
  for (int y = 0; y < boards_.grid.height; ++y) {
    for (int x = 0; x < boards_.grid.width; ++x) {
      if (!tried_.count({x, y})) open.push_back({x, y});
    }
  }
  if (open.empty()) throw std::logic_error("bot has no cell left to attack");
  Location l = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng_)];
  tried_.insert(l);
  return l;
}

void Bot::attack_result(Location at, AttackOutcome outcome) {
  boards_.record_attack(at, outcome);
  if (outcome == AttackOutcome::hit) {
    for (Location d : {Location{1, 0}, Location{-1, 0}, Location{0, 1}, Location{0, -1}}) {
      targets_.push_back({at.x + d.x, at.y + d.y});
    }
  }
  if (outcome == AttackOutcome::sunk) targets_.clear();
}

void Bot::attacked(Location at, bool hit) { boards_.record_incoming(at, hit); }

TerminalPlayer::TerminalPlayer(std::istream& in, std::ostream& out, std::uint32_t seed, Grid grid)
    : in_(in), out_(out), rng_(seed) {
  boards_.grid = grid;
}

Config TerminalPlayer::fleet() {
  boards_.own = random_fleet(rng_, boards_.grid);
  out_ << "Your fleet:\n" << render_boards(boards_) << std::flush;
  return boards_.own;
}

Location TerminalPlayer::next_attack() {
  for (;;) {
    out_ << "attack x y> " << std::flush;
    std::string line;
    if (!std::getline(in_, line)) throw std::runtime_error("input closed");
    std::istringstream ls(line);
    std::string word;
    Location l{-1, -1};
    ls >> word;
    if (word != "attack") {
      ls.clear();
      ls.str(line);
    }
    if (ls >> l.x >> l.y && boards_.grid.contains(l)) return l;
    out_ << "expected: attack x y  (0 <= x < " << boards_.grid.width << ", 0 <= y < "
         << boards_.grid.height << ")\n";
  }
}

void TerminalPlayer::attack_result(Location at, AttackOutcome outcome) {
  boards_.record_attack(at, outcome);
  out_ << "(" << at.x << "," << at.y << "): " << to_string(outcome) << "\n"
       << render_boards(boards_) << std::flush;
}

void TerminalPlayer::attacked(Location at, bool hit) {
  boards_.record_incoming(at, hit);
  out_ << "opponent fired at (" << at.x << "," << at.y << "): " << (hit ? "hit" : "miss") << "\n"
       << render_boards(boards_) << std::flush;
}

void TerminalPlayer::finished(bool won) { out_ << (won ? "You won.\n" : "You lost.\n") << std::flush; }

}  // namespace battleship
