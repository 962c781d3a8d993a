#include "sdc/io/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <string>

#include "sdc/error.hpp"

namespace sdc {
namespace {

std::atomic<int> g_level{-1};
std::mutex g_write;

const char* tag(LogLevel level) {
    switch (level) {
        case LogLevel::Error: return "error";
        case LogLevel::Warn: return "warn";
        case LogLevel::Info: return "info";
        case LogLevel::Debug: return "debug";
        default: return "";
    }
}

}  // namespace

LogLevel parse_log_level(std::string_view name) {
    if (name == "quiet") return LogLevel::Quiet;
    if (name == "error") return LogLevel::Error;
    if (name == "warn") return LogLevel::Warn;
    if (name == "info") return LogLevel::Info;
    if (name == "debug") return LogLevel::Debug;
    fail(ErrorKind::InvalidConfig, "unknown log level '" + std::string(name) + "'");
}

LogLevel log_level() {
    int v = g_level.load();
    if (v < 0) {
        LogLevel level = LogLevel::Info;
        if (const char* env = std::getenv("SDC_LOG")) {
            try {
                level = parse_log_level(env);
            } catch (const Error&) {
                std::fprintf(stderr, "[warn] ignoring SDC_LOG=%s\n", env);
            }
        }
        v = int(level);
        g_level.store(v);
    }
    return LogLevel(v);
}

void set_log_level(LogLevel level) { g_level.store(int(level)); }

void log(LogLevel level, std::string_view message) {
    if (level == LogLevel::Quiet || int(level) > int(log_level())) return;
    std::lock_guard lock(g_write);
    std::fprintf(stderr, "[%s] %.*s\n", tag(level), int(message.size()), message.data());
}

}  // namespace sdc
