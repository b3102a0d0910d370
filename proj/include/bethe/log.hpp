#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace bethe::log {

enum Level { error = 0, info = 1, debug = 2 };

inline Level threshold() {
    static const Level cached = [] {
        const char* env = std::getenv("BETHE_LOG");
        if (!env) return error;
        if (std::strcmp(env, "debug") == 0) return debug;
        if (std::strcmp(env, "info") == 0) return info;
        return error;
    }();
    return cached;
}

template <typename... Args>
void emit(Level lvl, const char* fmt, Args... args) {
    if (lvl > threshold()) return;
    const char* tag = lvl == error ? "error" : (lvl == info ? "info" : "debug");
    std::fprintf(stderr, "[bethe %s] ", tag);
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
}

}  // namespace bethe::log
