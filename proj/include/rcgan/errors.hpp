#pragma once

#include <stdexcept>
#include <string>

namespace rcgan {

// Configuration problems (bad values, unknown names). CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tensor shape disagreements between operands.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// NaN/Inf detected in a loss term. CLI exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem and decode failures.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rcgan
