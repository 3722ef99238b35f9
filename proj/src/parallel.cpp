#include "ghs/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace ghs {

namespace {

unsigned initial_thread_count() {
  if (const char* env = std::getenv("GHS_THREADS")) {
    try {
      const int parsed = std::stoi(env);
      if (parsed > 0) return static_cast<unsigned>(parsed);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> value{initial_thread_count()};
  return value;
}

}  // namespace

unsigned thread_count() { return thread_setting().load(); }

void set_thread_count(unsigned threads) { thread_setting().store(std::max(1u, threads)); }

}  // namespace ghs
