#pragma once

#include <functional>
#include <string_view>

namespace kwstega {

using LogSink = std::function<void(std::string_view)>;

/// Replaces the warning sink (default: stderr). Pass an empty function to
/// silence warnings.
void set_log_sink(LogSink sink);
void log_warning(std::string_view message);

}  // namespace kwstega
