#pragma once

#include <atomic>
#include <iostream>
#include <mutex>
#include <string>

namespace sclaw {

enum class LogLevel { Quiet = 0, Warn = 1, Info = 2 };

inline std::atomic<int>& log_level_storage() {
  static std::atomic<int> level{static_cast<int>(LogLevel::Warn)};
  return level;
}

inline void set_log_level(LogLevel l) { log_level_storage() = static_cast<int>(l); }

/// Log lines go to stderr so they never mix with data written to stdout.
inline void log_line(LogLevel l, const std::string& msg) {
  if (static_cast<int>(l) > log_level_storage()) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::clog << (l == LogLevel::Warn ? "[warn] " : "[info] ") << msg << '\n';
}

inline void log_warn(const std::string& msg) { log_line(LogLevel::Warn, msg); }
inline void log_info(const std::string& msg) { log_line(LogLevel::Info, msg); }

}  // namespace sclaw
