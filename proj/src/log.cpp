#include "smecs/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

namespace smecs {

std::shared_ptr<spdlog::logger> logger() {
  static auto instance = [] {
    if (auto existing = spdlog::get("smecs"))
      return existing;
    auto created = spdlog::stderr_color_mt("smecs");
    created->set_level(spdlog::level::warn);
    return created;
  }();
  return instance;
}

} // namespace smecs
