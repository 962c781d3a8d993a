#pragma once

#include <string_view>

namespace sdc {

enum class LogLevel { Quiet, Error, Warn, Info, Debug };

// Threshold read once from SDC_LOG (quiet|error|warn|info|debug, default info).
LogLevel log_level();
void set_log_level(LogLevel level);
// Throws InvalidConfig on an unknown name.
LogLevel parse_log_level(std::string_view name);

// One line to stderr, prefixed with the level, when level <= threshold.
void log(LogLevel level, std::string_view message);

}  // namespace sdc
