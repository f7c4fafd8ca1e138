#include "mixred/common.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <thread>

#include "mixred/parallel.hpp"

namespace mixred {

static LogLevel parse_log_level() {
  const char* env = std::getenv("MIXRED_LOG");
  if (env == nullptr) return LogLevel::Error;
  if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
  if (std::strcmp(env, "info") == 0) return LogLevel::Info;
  return LogLevel::Error;
}

LogLevel log_level() {
  static const LogLevel level = parse_log_level();
  return level;
}

bool log_enabled(LogLevel level) {
  return static_cast<int>(level) <= static_cast<int>(log_level());
}

void log_message(LogLevel level, const std::string& msg) {
  if (!log_enabled(level)) return;
  const char* tag = "error";
  if (level == LogLevel::Info) tag = "info";
  if (level == LogLevel::Debug) tag = "debug";
  std::fprintf(stderr, "mixred %s: %s\n", tag, msg.c_str());
}

static std::atomic<std::size_t> g_num_threads{0};

void set_num_threads(std::size_t n) {
  g_num_threads.store(n == 0 ? 1 : n, std::memory_order_relaxed);
}

std::size_t num_threads() {
  std::size_t n = g_num_threads.load(std::memory_order_relaxed);
  if (n == 0) {
    n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
  }
  return n;
}

}  // namespace mixred
