#pragma once

#include <stdexcept>
#include <string>

namespace indnet {

/// Tensor shapes that do not fit the operation.
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A caller broke an operation's precondition (non-scalar loss, empty class, label range).
class ContractError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Invalid configuration values.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or insufficient input data, including files.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// NaN or Inf detected in a loss or gradient.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace indnet
