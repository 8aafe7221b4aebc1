#pragma once

#include <stdexcept>
#include <string>

namespace mic {

// Invalid inputs: malformed matrices, out-of-range targets, bad arguments.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative procedures that did not reach their tolerance.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// File access and parse failures.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mic
