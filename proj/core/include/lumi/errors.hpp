#pragma once

#include <stdexcept>
#include <string>

namespace lumi {

/// Operands live on different grids, or a value does not fit the grid.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A machine, path or abstraction violates its defining contract.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A combinatorial or state-space bound was exceeded.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario, formula or table input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lumi
