#include "mpst/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <string_view>

namespace mpst {

void init_logging_from_env() {
  auto logger = spdlog::stderr_color_mt("mpst");
  spdlog::set_default_logger(logger);
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* v = std::getenv("MPST_LOG")) {
    const std::string_view s(v);
    if (s == "error") level = spdlog::level::err;
    if (s == "warn") level = spdlog::level::warn;
    if (s == "info") level = spdlog::level::info;
    if (s == "debug") level = spdlog::level::debug;
  }
  spdlog::set_level(level);
}

}  // namespace mpst
