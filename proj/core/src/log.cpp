#include "kwstega/log.hpp"

#include <iostream>
#include <mutex>

namespace kwstega {
namespace {

std::mutex g_mutex;
LogSink g_sink = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard lock(g_mutex);
  g_sink = std::move(sink);
}

void log_warning(std::string_view message) {
  std::lock_guard lock(g_mutex);
  if (g_sink) g_sink(message);
}

}  // namespace kwstega
