#include "battleship/endpoints.hpp"

#include <atomic>
#include <mpst/rt/mpst.hpp>
#include <spdlog/spdlog.h>
#include <thread>

#include "Game/BattleShips_GameServer.hpp"
#include "Game/BattleShips_P1.hpp"
#include "Game/BattleShips_P2.hpp"

namespace battleship {

namespace msg = Game::messages;
using namespace mpst::rt;

namespace {

namespace p1 = Game::BattleShips_P1;

using P1End = Terminal<p1::P1>::state;

Session<p1::S4, P1End, Outcome> p1_defend(Player& pl);

Session<p1::S2, P1End, Outcome> p1_attack(Player& pl) {
  return lift([&pl] { return pl.next_attack(); }) >>= [&pl](Location at) {
    return send(msg::Attack_Location{at}) >> choice(p1::S3_branches{
      .hit = receive() >>= [&pl, at](msg::Hit) {
        pl.attack_result(at, AttackOutcome::hit);
        return defer([&pl] { return p1_attack(pl); });
      },
      .miss = receive() >>= [&pl, at](msg::Miss) {
        pl.attack_result(at, AttackOutcome::miss);
        return defer([&pl] { return p1_defend(pl); });
      },
      .sunk = receive() >>= [&pl, at](msg::Sunk) {
        pl.attack_result(at, AttackOutcome::sunk);
        return defer([&pl] { return p1_attack(pl); });
      },
      .winner = receive() >>= [&pl, at](msg::Winner) {
        pl.attack_result(at, AttackOutcome::win);
        pl.finished(true);
        return pure(Outcome::won);
      },
    });
  };
}

Session<p1::S4, P1End, Outcome> p1_defend(Player& pl) {
  return choice(p1::S4_branches{
    .hit = receive() >>= [&pl](msg::Hit_Location m) {
      pl.attacked(m.location, true);
      return defer([&pl] { return p1_defend(pl); });
    },
    .miss = receive() >>= [&pl](msg::Miss_Location m) {
      pl.attacked(m.location, false);
      return defer([&pl] { return p1_attack(pl); });
    },
    .loser = receive() >>= [&pl](msg::Loser) {
      pl.finished(false);
      return pure(Outcome::lost);
    },
  });
}

namespace p2 = Game::BattleShips_P2;

using P2End = Terminal<p2::P2>::state;

Session<p2::S3, P2End, Outcome> p2_attack(Player& pl);

Session<p2::S2, P2End, Outcome> p2_defend(Player& pl) {
  return choice(p2::S2_branches{
    .hit = receive() >>= [&pl](msg::Hit_Location m) {
      pl.attacked(m.location, true);
      return defer([&pl] { return p2_defend(pl); });
    },
    .miss = receive() >>= [&pl](msg::Miss_Location m) {
      pl.attacked(m.location, false);
      return defer([&pl] { return p2_attack(pl); });
    },
    .loser = receive() >>= [&pl](msg::Loser) {
      pl.finished(false);
      return pure(Outcome::lost);
    },
  });
}

Session<p2::S3, P2End, Outcome> p2_attack(Player& pl) {
  return lift([&pl] { return pl.next_attack(); }) >>= [&pl](Location at) {
    return send(msg::Attack_Location{at}) >> choice(p2::S4_branches{
      .hit = receive() >>= [&pl, at](msg::Hit) {
        pl.attack_result(at, AttackOutcome::hit);
        return defer([&pl] { return p2_attack(pl); });
      },
      .miss = receive() >>= [&pl, at](msg::Miss) {
        pl.attack_result(at, AttackOutcome::miss);
        return defer([&pl] { return p2_defend(pl); });
      },
      .sunk = receive() >>= [&pl, at](msg::Sunk) {
        pl.attack_result(at, AttackOutcome::sunk);
        return defer([&pl] { return p2_attack(pl); });
      },
      .winner = receive() >>= [&pl, at](msg::Winner) {
        pl.attack_result(at, AttackOutcome::win);
        pl.finished(true);
        return pure(Outcome::won);
      },
    });
  };
}

namespace gs = Game::BattleShips_GameServer;

using GsEnd = Terminal<gs::GameServer>::state;

struct Match {
  ServerOptions options;
  std::optional<MatchState> state;
  std::size_t repeats = 0;

  MatchState::Judgement judge(Location at) {
    auto j = state->attack(at);
    if (j.repeat) {
      ++repeats;
      spdlog::warn("P{} attacked ({},{}) again; answered as a miss", state->defender() + 1, at.x,
                   at.y);
    }
    return j;
  }
};

Session<gs::S8, GsEnd, Unit> p2_attacks(Match& m);

Session<gs::S4, GsEnd, Unit> p1_attacks(Match& m) {
  return receive() >>= [&m](msg::Attack_Location a) -> Session<gs::S5, GsEnd, Unit> {
    switch (m.judge(a.location).outcome) {
      case AttackOutcome::hit:
        return send(msg::Hit{}) >> send(msg::Hit_Location{a.location}) >>
               defer([&m] { return p1_attacks(m); });
      case AttackOutcome::miss:
        return send(msg::Miss{}) >> send(msg::Miss_Location{a.location}) >>
               defer([&m] { return p2_attacks(m); });
      case AttackOutcome::sunk:
        return send(msg::Sunk{}) >> send(msg::Hit_Location{a.location}) >>
               defer([&m] { return p1_attacks(m); });
      case AttackOutcome::win:
        break;
    }
    return send(msg::Winner{}) >> send(msg::Loser{}) >> done();
  };
}

Session<gs::S8, GsEnd, Unit> p2_attacks(Match& m) {
  return receive() >>= [&m](msg::Attack_Location a) -> Session<gs::S9, GsEnd, Unit> {
    switch (m.judge(a.location).outcome) {
      case AttackOutcome::hit:
        return send(msg::Hit{}) >> send(msg::Hit_Location{a.location}) >>
               defer([&m] { return p2_attacks(m); });
      case AttackOutcome::miss:
        return send(msg::Miss{}) >> send(msg::Miss_Location{a.location}) >>
               defer([&m] { return p1_attacks(m); });
      case AttackOutcome::sunk:
        return send(msg::Sunk{}) >> send(msg::Hit_Location{a.location}) >>
               defer([&m] { return p2_attacks(m); });
      case AttackOutcome::win:
        break;
    }
    return send(msg::Winner{}) >> send(msg::Loser{}) >> done();
  };
}

void check_fleet(const Match& m, int player, const Config& c) {
  auto v = validate_config(c, m.options.grid, m.options.fleet);
  if (!v.empty()) throw ConfigRejected(player, std::move(v));
}

}  // namespace

ConfigRejected::ConfigRejected(int p, std::vector<Violation> vs)
    : std::runtime_error("P" + std::to_string(p) + " submitted an invalid fleet: " +
                         (vs.empty() ? std::string() : vs.front().code + " " + vs.front().message)),
      player(p),
      violations(std::move(vs)) {}

Outcome play_p1(Player& pl, const std::string& address, SessionOptions opts) {
  auto game = connect<p1::GameServer>(address) >> lift([&pl] { return pl.fleet(); }) >>=
      [&pl](Config c) { return send(msg::Init_Config{std::move(c)}) >> defer([&pl] { return p1_attack(pl); }); };
  return run_session<p1::P1>(std::move(opts), game);
}

Outcome play_p2(Player& pl, const std::string& address, SessionOptions opts) {
  auto game = connect<p2::GameServer>(address) >> lift([&pl] { return pl.fleet(); }) >>=
      [&pl](Config c) { return send(msg::Init_Config{std::move(c)}) >> defer([&pl] { return p2_defend(pl); }); };
  return run_session<p2::P2>(std::move(opts), game);
}

MatchReport serve_match(Listener& listener, SessionOptions opts, const ServerOptions& server) {
  RoleBinder binder("BattleShips", {"P1", "P2"});
  std::atomic<bool> stop{false};
  std::thread feeder([&] {
    while (!stop && !binder.all_bound()) {
      try {
        auto in = listener.accept(std::chrono::milliseconds(100));
        try {
          spdlog::info("bound {}", binder.offer(std::move(in)));
        } catch (const ProtocolError& e) {
          spdlog::warn("{}", e.what());
        }
      } catch (const TransportError& e) {
        if (e.kind() != TransportError::Kind::timeout) {
          spdlog::warn("listener: {}", e.what());
          return;
        }
      }
    }
  });
  opts.acceptor = binder.acceptor();

  Match m{server, std::nullopt, 0};
  auto game = accept<gs::P1>() >> accept<gs::P2>() >> receive() >>= [&m](msg::Init_Config c1) {
    return receive() >>= [&m, c1](msg::Init_Config c2) {
      check_fleet(m, 1, c1.config);
      check_fleet(m, 2, c2.config);
      m.state.emplace(c1.config, c2.config);
      return defer([&m] { return p1_attacks(m); });
    };
  };
  try {
    run_session<gs::GameServer>(std::move(opts), game);
  } catch (...) {
    stop = true;
    feeder.join();
    throw;
  }
  stop = true;
  feeder.join();
  return MatchReport{*m.state->winner() + 1, m.state->attacks(), m.repeats};
}

}  // namespace battleship
