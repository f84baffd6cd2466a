#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace parboost {

// Verbosity comes from the BOOST_LOG environment variable:
// 0 = errors only (default), 1 = info, 2 = debug.
inline int log_level() {
  static const int level = [] {
    const char* env = std::getenv("BOOST_LOG");
    if (!env || !*env) return 0;
    return std::atoi(env);
  }();
  return level;
}

inline void log_warn(const std::string& msg) {
  std::fprintf(stderr, "[warn] %s\n", msg.c_str());
}

inline void log_info(const std::string& msg) {
  if (log_level() >= 1) std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::fprintf(stderr, "[debug] %s\n", msg.c_str());
}

} // namespace parboost
