#pragma once

#include <stdexcept>
#include <string>

namespace qperc {

// Thrown when two vertices passed as an edge are not at Hamming distance 1.
struct not_adjacent_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an ordered-pair operation receives u that is not below v.
struct not_comparable_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a dense computation would exceed the configured memory budget.
struct dimension_too_large_error : std::length_error {
    using std::length_error::length_error;
};

struct invalid_input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct invalid_parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct vertex_not_in_tree_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown by tree verification when a trace is inconsistent with its tree.
struct trace_mismatch_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Thrown when a computed quantity violates a structural invariant.
struct invariant_violation_error : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace qperc
