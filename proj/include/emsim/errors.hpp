#pragma once

#include <stdexcept>
#include <string>

namespace emsim {

/// Invalid configuration (bad field values, inconsistent options).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Requested frequency cannot be reached by the emitter's tuning range.
struct unreachable_error : std::runtime_error {
    explicit unreachable_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A brightness track carries no signal at all.
struct no_signal_error : std::runtime_error {
    explicit no_signal_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Degenerate input to a statistical fit.
struct fit_error : std::runtime_error {
    explicit fit_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem / serialization failure.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace emsim
