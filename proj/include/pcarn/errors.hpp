// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_ERRORS_HPP
#define PCARN_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pcarn {

// Bad files, directories or on-disk content. CLI exit code 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training diverged (NaN/Inf loss). CLI exit code 3.
struct NumericError : std::runtime_error {
    NumericError(const std::string& msg, int64_t step_, double lr_)
        : std::runtime_error(msg + " (step " + std::to_string(step_) +
                             ", lr " + std::to_string(lr_) + ")"),
          step(step_), lr(lr_) {}
    int64_t step;
    double lr;
};

// Bad flags or config. CLI exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace pcarn

#endif
