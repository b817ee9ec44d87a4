#pragma once

#include <stdexcept>
#include <string>

namespace isid {

// Wrong matrix shape, sequence length or other precondition on dimensions.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A matrix that must have full (row or column) rank does not.
struct RankError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Time index or order outside the range an object is defined for.
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Iterative factorization failed to converge.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid user input (configuration, files).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace isid
