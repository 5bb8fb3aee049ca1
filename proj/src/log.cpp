#include "scdt/log.hpp"

#include <atomic>
#include <iostream>

namespace scdt {

namespace {
std::atomic<LogLevel> g_level{LogLevel::info};

void emit(LogLevel level, std::string_view tag, std::string_view message) {
  if (level < g_level.load()) return;
  std::clog << "[" << tag << "] " << message << '\n';
}
}  // namespace

void set_log_level(LogLevel level) { g_level.store(level); }
LogLevel log_level() { return g_level.load(); }

void log_info(std::string_view message) { emit(LogLevel::info, "info", message); }
void log_warning(std::string_view message) { emit(LogLevel::warning, "warn", message); }

}  // namespace scdt
