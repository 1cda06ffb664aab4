#pragma once

#include <stdexcept>
#include <string>

namespace geodp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed files, ragged rows, schema violations.
struct InputError : Error {
  using Error::Error;
};

// Incompatible generator/mechanism parameters.
struct ConfigError : Error {
  using Error::Error;
};

// rank(A) < d where a full-rank matrix is required.
struct RankError : Error {
  using Error::Error;
};

// Numerical non-invertibility during ellipsoid iteration.
struct ConditioningError : Error {
  using Error::Error;
};

// Combinatorial budget exceeded in brute-force enumeration.
struct BudgetError : Error {
  using Error::Error;
};

// Degenerate direction or non-full-dimensional body.
struct DimensionError : Error {
  using Error::Error;
};

}  // namespace geodp
