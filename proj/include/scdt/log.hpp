#pragma once

#include <string_view>

namespace scdt {

enum class LogLevel { debug, info, warning, error, quiet };

void set_log_level(LogLevel level);
LogLevel log_level();

void log_info(std::string_view message);
void log_warning(std::string_view message);

}  // namespace scdt
