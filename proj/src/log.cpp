#include "tship/log.hpp"

#include <cstdlib>
#include <iostream>

namespace tship {

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("TSHIP_LOG");
    if (!env) return LogLevel::error;
    std::string s(env);
    if (s == "debug") return LogLevel::debug;
    if (s == "info") return LogLevel::info;
    return LogLevel::error;
  }();
  return level;
}

void log_msg(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  std::cerr << "tship: " << msg << '\n';
}

}  // namespace tship
