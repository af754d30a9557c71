#pragma once

#include <memory>

#include <spdlog/spdlog.h>

namespace smecs {

// Library-wide logger named "smecs". Tests may attach extra sinks to it.
std::shared_ptr<spdlog::logger> logger();

} // namespace smecs
