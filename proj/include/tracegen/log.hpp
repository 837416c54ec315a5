#pragma once

#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "tracegen/common.hpp"

namespace tracegen {

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

inline LogLevel parse_log_level(const std::string& s) {
  if (s == "debug") return LogLevel::Debug;
  if (s == "info") return LogLevel::Info;
  if (s == "warn") return LogLevel::Warn;
  if (s == "error") return LogLevel::Error;
  if (s == "off") return LogLevel::Off;
  fail(ErrorKind::InvalidArgument, "unknown log level: " + s);
}

inline LogLevel& log_level() {
  static LogLevel level = LogLevel::Info;
  return level;
}

// One JSON object per line on stderr; stdout stays reserved for artifacts.
inline void log_event(LogLevel level, const std::string& event, nlohmann::json fields = {}) {
  if (level < log_level()) return;
  static const char* names[] = {"debug", "info", "warn", "error"};
  nlohmann::json line;
  line["level"] = names[static_cast<int>(level)];
  line["event"] = event;
  for (auto& [key, value] : fields.items()) line[key] = value;
  std::cerr << line.dump() << "\n";
}

inline void log_debug(const std::string& event, nlohmann::json fields = {}) {
  log_event(LogLevel::Debug, event, std::move(fields));
}
inline void log_info(const std::string& event, nlohmann::json fields = {}) {
  log_event(LogLevel::Info, event, std::move(fields));
}
inline void log_warn(const std::string& event, nlohmann::json fields = {}) {
  log_event(LogLevel::Warn, event, std::move(fields));
}
inline void log_error(const std::string& event, nlohmann::json fields = {}) {
  log_event(LogLevel::Error, event, std::move(fields));
}

}  // namespace tracegen
