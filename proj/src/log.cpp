#include "indnet/log.hpp"

#include <iostream>
#include <mutex>
#include <string>

namespace indnet::log {
namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

Sink& sink() {
    static Sink s;
    return s;
}

}  // namespace

void set_sink(Sink s) {
    std::lock_guard lock(sink_mutex());
    sink() = std::move(s);
}

void warn(std::string_view message) {
    std::lock_guard lock(sink_mutex());
    if (sink()) {
        sink()(message);
    } else {
        std::cerr << "warning: " << message << '\n';
    }
}

}  // namespace indnet::log
