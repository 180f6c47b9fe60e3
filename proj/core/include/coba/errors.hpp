// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace coba {

// Error taxonomy shared by the whole library. The CLI maps all
// usage/config/parse failures (everything except TrainingError) to
// exit code 2, and TrainingError to exit code 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid argument passed to an operation (wrong arity, empty input, ...).
struct ArgumentError : Error {
    using Error::Error;
};

// Invalid configuration (bad K/N/W/M/tau values, kind mismatch, ...).
struct ConfigError : Error {
    using Error::Error;
};

// Data-quality problem: non-finite or non-positive values where the
// contract requires otherwise.
struct DataError : Error {
    using Error::Error;
};

// Structural problem in an input file (missing header, ragged row, ...).
struct FormatError : Error {
    using Error::Error;
};

// Step sequence not strictly increasing.
struct OrderingError : Error {
    using Error::Error;
};

// File open/read/write failure; message carries the path.
struct IoError : Error {
    using Error::Error;
};

// Training diverged or produced non-finite state.
struct TrainingError : Error {
    using Error::Error;
};

} // namespace coba
