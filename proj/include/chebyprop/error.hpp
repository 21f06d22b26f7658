#pragma once

#include <stdexcept>

namespace chebyprop {

// Malformed input text (bad token, truncated binary header, ...).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally unusable data (empty graph after cleaning, cache mismatch).
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter outside its documented domain.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to converge within its budget.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem-level failure (cannot open / read / write).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace chebyprop
