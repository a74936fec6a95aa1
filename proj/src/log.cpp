#include "irsbeam/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace irsbeam {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("IRSBEAM_LOG");
    if (env == nullptr) return LogLevel::Off;
    if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    return LogLevel::Off;
  }();
  return level;
}

void log_message(LogLevel level, const std::string& message) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  const char* tag = level == LogLevel::Warn ? "warn" : level == LogLevel::Info ? "info" : "debug";
  std::fprintf(stderr, "[irsbeam %s] %s\n", tag, message.c_str());
}

}  // namespace irsbeam
