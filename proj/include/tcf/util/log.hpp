#pragma once
// Logging goes through spdlog to stderr.  The TCF_LOG environment variable
// (trace|debug|info|warn|error|off) sets the level; default is warn.

#include <spdlog/spdlog.h>

namespace tcf {

// Idempotent; applies TCF_LOG.
void init_logging();

}  // namespace tcf
