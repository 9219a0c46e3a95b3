#pragma once

#include <functional>
#include <string_view>

namespace indnet::log {

/// Warnings go to stderr unless a sink is installed (tests capture them).
using Sink = std::function<void(std::string_view)>;

void set_sink(Sink sink);
void warn(std::string_view message);

}  // namespace indnet::log
