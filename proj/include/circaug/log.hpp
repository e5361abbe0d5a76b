#pragma once

#include <string_view>

namespace circaug {

enum class LogLevel { debug = 0, info = 1, warning = 2, error = 3, off = 4 };

/// Messages below this level are dropped. Default: warning.
void set_log_level(LogLevel level);
LogLevel log_level();

void log(LogLevel level, std::string_view message);

inline void log_info(std::string_view message) { log(LogLevel::info, message); }
inline void log_warning(std::string_view message) { log(LogLevel::warning, message); }

}  // namespace circaug
