#pragma once

#include <stdexcept>
#include <string>

namespace tollcast {

// Base class for everything thrown by the library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input text (CSV syntax, bad dates, negative counts).
struct parse_error : error {
  using error::error;
};

// Invalid knob values (even window, alpha out of range, ...).
struct config_error : error {
  using error::error;
};

// Operation called on data that violates its preconditions
// (missing values present, empty selection, cutoff outside span, ...).
struct precondition_error : error {
  using error::error;
};

// Value outside the mathematical domain of an operation
// (non-positive input to a multiplicative decomposition).
struct domain_error : error {
  using error::error;
};

// Dimension mismatch between a model and the rows it is given.
struct shape_error : error {
  using error::error;
};

// Training diverged or could not proceed.
struct training_error : error {
  using error::error;
};

// File or stream failure.
struct io_error : error {
  using error::error;
};

}  // namespace tollcast
