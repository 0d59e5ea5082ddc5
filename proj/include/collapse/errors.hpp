#pragma once

#include <stdexcept>
#include <string>

namespace collapse {

// Exit-code mapping for the CLI: validation -> 1, numerical -> 2, io -> 3.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inconsistent kernel / generator construction (e.g. indefinite noise covariance).
struct ModelError : NumericalError {
    using NumericalError::NumericalError;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace collapse
