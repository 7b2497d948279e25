#pragma once

#include <stdexcept>
#include <string>

namespace mdmt {

// Invalid or inconsistent configuration (bad sizes, unknown keys, bad modes).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file (matrix text, IDX payload, checkpoint).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tensor dimensions do not line up.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation called in the wrong order or on an empty container.
struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Out-of-range labels or otherwise invalid data values.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values or domain violations during numerics.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failures.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mdmt
