#pragma once

#include <spdlog/spdlog.h>

namespace atypia {

/// Library logger writing to stderr. Level comes from ATYPIA_LOG
/// (trace, debug, info, warn, error, critical, off); default warn.
spdlog::logger& log();

}  // namespace atypia
