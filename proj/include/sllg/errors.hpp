#pragma once

#include <stdexcept>
#include <string>

namespace sllg {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad or inconsistent user input (config file, CLI flags, constructor args).
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Runtime failure inside a time step (non-finite state, solver stall).
struct StepError : Error {
    StepError(const std::string& msg, long step_index)
        : Error(msg + " (step " + std::to_string(step_index) + ")"), step(step_index) {}
    long step;
};

} // namespace sllg
