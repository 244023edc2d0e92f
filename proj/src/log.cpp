#include "csal/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace csal {

namespace {
std::atomic<bool> g_verbose{false};
std::mutex g_log_mutex;
}  // namespace

void set_verbose(bool on) { g_verbose = on; }
bool verbose() { return g_verbose; }

void warn(const std::string& message) {
  if (!g_verbose) return;
  std::lock_guard lock(g_log_mutex);
  std::clog << "csal: " << message << '\n';
}

}  // namespace csal
