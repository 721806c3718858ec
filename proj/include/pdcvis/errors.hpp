#pragma once

#include <stdexcept>
#include <string>

namespace pdcvis {

// Caller passed arguments that make no sense for the operation
// (unknown mode, identical modes, empty subset, out-of-range parameter).
struct usage_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Requested computation is outside what the configured limits allow
// (truncation tail too large, basis budget exceeded, binomial overflow).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric input failed a validation check (non-unitary matrix,
// unnormalized state where a normalized one is required).
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A quantity is mathematically undefined for the given input,
// e.g. g2 of the vacuum.
struct undefined_quantity : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace pdcvis
