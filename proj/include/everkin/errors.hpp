// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace everkin {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Motor set violates the two-motor actuation rule or has a negative angle.
struct InvalidMotorSet : Error {
    using Error::Error;
};

// Scalar argument outside its documented domain.
struct OutOfRange : Error {
    using Error::Error;
};

// Input is a degenerate case the operation cannot define (e.g. the origin
// has no pitch/rotation).
struct DegenerateInput : Error {
    using Error::Error;
};

// Malformed record in an input stream. `line` is 1-based; 0 means unknown.
struct ParseError : Error {
    explicit ParseError(const std::string& what, int line_no = 0)
        : Error(line_no > 0 ? what + " (line " + std::to_string(line_no) + ")" : what),
          line(line_no) {}
    int line;
};

// Input file does not have the expected header/schema.
struct SchemaError : Error {
    using Error::Error;
};

// Not enough usable samples for a fit.
struct InsufficientData : Error {
    using Error::Error;
};

// Calibration input mixes multiple active motors in one sample.
struct MultiMotorData : Error {
    using Error::Error;
};

// Parallel arrays passed to a batch operation disagree in length.
struct LengthMismatch : Error {
    using Error::Error;
};

// Configuration file is invalid. `path` is the dotted key path at fault,
// empty when the problem is not tied to one key.
struct ConfigError : Error {
    explicit ConfigError(const std::string& what, std::string key_path = {})
        : Error(key_path.empty() ? what : what + " (at " + key_path + ")"),
          path(std::move(key_path)) {}
    std::string path;
};

}  // namespace everkin
