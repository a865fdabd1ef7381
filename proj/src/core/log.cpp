#include "isf/core/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace isf::log {

static Level parse_env() {
    const char* v = std::getenv("ISF_LOG");
    if (v == nullptr) return Level::Warn;
    if (std::strcmp(v, "debug") == 0) return Level::Debug;
    if (std::strcmp(v, "info") == 0) return Level::Info;
    if (std::strcmp(v, "warn") == 0) return Level::Warn;
    if (std::strcmp(v, "error") == 0) return Level::Error;
    if (std::strcmp(v, "off") == 0) return Level::Off;
    return Level::Warn;
}

Level threshold() {
    static Level level = parse_env();
    return level;
}

void write(Level level, const std::string& message) {
    if (level < threshold()) return;
    static std::mutex mu;
    static const char* names[] = {"DEBUG", "INFO", "WARN", "ERROR"};
    std::lock_guard lock(mu);
    std::fprintf(stderr, "[isf %s] %s\n", names[static_cast<int>(level)], message.c_str());
}

} // namespace isf::log
