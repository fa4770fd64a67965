#include <CLI11.hpp>
#include <iostream>
#include <spdlog/spdlog.h>

#include "battleship/endpoints.hpp"
#include "mpst/log.hpp"
#include "mpst/rt/transport.hpp"

int main(int argc, char** argv) {
  mpst::init_logging_from_env();
  CLI::App app{"Battleship over multiparty sessions"};
  app.require_subcommand(1);

  std::string bind = "ws://127.0.0.1:8080/battleship";
  std::string url = "ws://127.0.0.1:8080/battleship";
  std::string role = "P1";
  std::uint32_t seed = 1;
  int matches = 0;

  auto* server = app.add_subcommand("server", "Run the game server");
  server->add_option("--bind", bind, "Listen address");
  server->add_option("--matches", matches, "Stop after this many matches (0 = run forever)");

  auto* bot = app.add_subcommand("bot", "Play with the scripted bot");
  bot->add_option("--url", url, "Server address");
  bot->add_option("--seed", seed, "Random seed");
  bot->add_option("--role", role, "P1 or P2")->check(CLI::IsMember({"P1", "P2"}));

  auto* play = app.add_subcommand("play", "Play from the terminal");
  play->add_option("--url", url, "Server address");
  play->add_option("--seed", seed, "Seed for the fleet placement");
  play->add_option("--role", role, "P1 or P2")->check(CLI::IsMember({"P1", "P2"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*server) {
      auto listener = mpst::rt::listen(bind);
      std::cout << "listening on " << listener->address() << std::endl;
      for (int n = 0; matches == 0 || n < matches; ++n) {
        try {
          auto r = battleship::serve_match(*listener);
          std::cout << "match " << n + 1 << ": P" << r.winner << " wins after " << r.attacks
                    << " attacks" << std::endl;
        } catch (const battleship::ConfigRejected& e) {
          spdlog::error("{}", e.what());
        } catch (const std::exception& e) {
          spdlog::error("match aborted: {}", e.what());
        }
      }
      return 0;
    }
    std::unique_ptr<battleship::Player> player;
    if (*bot) {
      player = std::make_unique<battleship::Bot>(seed);
    } else {
      player = std::make_unique<battleship::TerminalPlayer>(std::cin, std::cout, seed);
    }
    auto outcome = role == "P1" ? battleship::play_p1(*player, url) : battleship::play_p2(*player, url);
    std::cout << (outcome == battleship::Outcome::won ? "won" : "lost") << std::endl;
    return 0;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
