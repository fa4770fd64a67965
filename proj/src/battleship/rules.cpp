#include "battleship/rules.hpp"

#include <algorithm>
#include <map>

namespace battleship {

namespace {

std::string show(Location l) { return "(" + std::to_string(l.x) + "," + std::to_string(l.y) + ")"; }

}  // namespace

std::vector<int> classic_fleet() { return {5, 4, 3, 3, 2}; }

std::vector<Violation> validate_config(const Config& c, const Grid& grid,
                                       const std::vector<int>& fleet) {
  std::vector<Violation> out;
  std::map<Location, std::size_t> owner;
  for (std::size_t i = 0; i < c.ships.size(); ++i) {
    const Ship& ship = c.ships[i];
    const std::string name = "ship " + std::to_string(i);
    if (ship.empty()) {
      out.push_back({"EMPTY_SHIP", name + " has no cells"});
      continue;
    }
    for (const auto& l : ship) {
      if (!grid.contains(l)) out.push_back({"OUT_OF_BOUNDS", name + " leaves the grid at " + show(l)});
      auto [it, fresh] = owner.emplace(l, i);
      if (!fresh) {
        out.push_back({"OVERLAP", name + " overlaps ship " + std::to_string(it->second) + " at " + show(l)});
      }
    }
    const bool row = std::all_of(ship.begin(), ship.end(), [&](Location l) { return l.y == ship[0].y; });
    const bool col = std::all_of(ship.begin(), ship.end(), [&](Location l) { return l.x == ship[0].x; });
    if (!row && !col) {
      out.push_back({"NOT_STRAIGHT", name + " is not a horizontal or vertical line"});
      continue;
    }
    std::vector<int> coords;
    for (const auto& l : ship) coords.push_back(row ? l.x : l.y);
    std::sort(coords.begin(), coords.end());
    for (std::size_t k = 1; k < coords.size(); ++k) {
      if (coords[k] != coords[k - 1] + 1) {
        out.push_back({"NOT_CONTIGUOUS", name + " has a gap or a repeated cell"});
        break;
      }
    }
  }
  std::vector<int> want = fleet;
  std::vector<int> got;
  for (const auto& s : c.ships) got.push_back(static_cast<int>(s.size()));
  std::sort(want.begin(), want.end());
  std::sort(got.begin(), got.end());
  if (want != got) out.push_back({"FLEET_MISMATCH", "ship lengths do not match the fleet"});
  return out;
}

std::string_view to_string(AttackOutcome o) {
  switch (o) {
    case AttackOutcome::hit: return "hit";
    case AttackOutcome::miss: return "miss";
    case AttackOutcome::sunk: return "sunk";
    case AttackOutcome::win: return "win";
  }
  return "?";
}

RepeatAttack::RepeatAttack(Location l)
    : std::runtime_error("cell " + show(l) + " was already attacked"), location(l) {}

AttackOutcome judge_attack(const Config& defender, const std::set<Location>& judged, Location loc) {
  if (judged.count(loc)) throw RepeatAttack(loc);
  auto sunk = [&](const Ship& s) {
    return std::all_of(s.begin(), s.end(), [&](Location l) { return l == loc || judged.count(l); });
  };
  const Ship* target = nullptr;
  for (const auto& s : defender.ships) {
    if (std::find(s.begin(), s.end(), loc) != s.end()) target = &s;
  }
  if (!target) return AttackOutcome::miss;
  if (!sunk(*target)) return AttackOutcome::hit;
  const bool fleet_down = std::all_of(defender.ships.begin(), defender.ships.end(), sunk);
  return fleet_down ? AttackOutcome::win : AttackOutcome::sunk;
}

MatchState::MatchState(Config p1, Config p2) : fleets_{std::move(p1), std::move(p2)} {}

MatchState::Judgement MatchState::attack(Location loc) {
  ++attacks_;
  auto& judged = judged_[static_cast<std::size_t>(defender())];
  Judgement j{AttackOutcome::miss, false};
  try {
    j.outcome = judge_attack(fleet(defender()), judged, loc);
  } catch (const RepeatAttack&) {
    j.repeat = true;
  }
  judged.insert(loc);
  if (j.outcome == AttackOutcome::win) winner_ = attacker_;
  if (j.outcome == AttackOutcome::miss) attacker_ = defender();
  return j;
}

}  // namespace battleship
