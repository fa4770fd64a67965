#pragma once

namespace mpst {

/// Sends spdlog output to stderr at the level named by MPST_LOG
/// (error, warn, info, debug). Defaults to warn.
void init_logging_from_env();

}  // namespace mpst
