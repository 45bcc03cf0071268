#pragma once

#include <memory>

#include <spdlog/spdlog.h>

namespace ragq {

// Diagnostic logger on stderr. Level comes from RAGQ_LOG (error, info, debug);
// the default is info.
std::shared_ptr<spdlog::logger> logger();

}  // namespace ragq
