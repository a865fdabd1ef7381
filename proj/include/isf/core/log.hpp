#pragma once

#include <string>

namespace isf::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

// Threshold comes from the ISF_LOG environment variable (debug|info|warn|error|off),
// read once on first use. Default: warn.
Level threshold();

void write(Level level, const std::string& message);

inline void debug(const std::string& m) { write(Level::Debug, m); }
inline void info(const std::string& m) { write(Level::Info, m); }
inline void warn(const std::string& m) { write(Level::Warn, m); }
inline void error(const std::string& m) { write(Level::Error, m); }

} // namespace isf::log
