#pragma once

#include <string>

namespace vepsim {

enum class LogLevel { Quiet = 0, Warning = 1, Info = 2 };

void set_log_level(LogLevel level);
LogLevel log_level();
void log_info(const std::string& msg);
void log_warning(const std::string& msg);

}  // namespace vepsim
