#include "logging.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace morphkit::cli {

void init_logging() {
    auto logger = spdlog::stderr_color_mt("morphkit");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("MORPHKIT_LOG");
    const spdlog::level::level_enum level = env ? spdlog::level::from_str(env) : spdlog::level::warn;
    spdlog::set_level(level);
    if (env && level == spdlog::level::off && std::string(env) != "off") {
        spdlog::set_level(spdlog::level::warn);
        spdlog::warn("unrecognised MORPHKIT_LOG value '{}', using warn", env);
    }
}

}  // namespace morphkit::cli
