#pragma once

#include <stdexcept>
#include <string>

namespace mvgd {

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a |phi*| falls below weight_eps and the normalized weights
// w_k = u_k / |phi*_k| would blow up (true evidence at the marginal mode,
// independent Y/Z blocks, ...).
struct DegenerateNormalization : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RetryLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mvgd
