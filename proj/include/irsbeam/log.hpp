#pragma once

#include <string>

namespace irsbeam {

// Log level is read once from IRSBEAM_LOG: off (default), warn, info, debug.
enum class LogLevel { Off = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_level();
void log_message(LogLevel level, const std::string& message);

inline void log_warn(const std::string& m) { log_message(LogLevel::Warn, m); }
inline void log_info(const std::string& m) { log_message(LogLevel::Info, m); }
inline void log_debug(const std::string& m) { log_message(LogLevel::Debug, m); }

}  // namespace irsbeam
