#include "ragq/log.hpp"

#include <cstdlib>
#include <string_view>

#include <spdlog/sinks/stdout_color_sinks.h>

namespace ragq {

namespace {

spdlog::level::level_enum level_from_env() {
  const char* raw = std::getenv("RAGQ_LOG");
  if (raw == nullptr) return spdlog::level::info;
  const std::string_view v(raw);
  if (v == "error") return spdlog::level::err;
  if (v == "debug") return spdlog::level::debug;
  return spdlog::level::info;
}

}  // namespace

std::shared_ptr<spdlog::logger> logger() {
  static const auto instance = [] {
    auto lg = spdlog::stderr_color_mt("ragq");
    lg->set_pattern("[%l] %v");
    lg->set_level(level_from_env());
    return lg;
  }();
  return instance;
}

}  // namespace ragq
