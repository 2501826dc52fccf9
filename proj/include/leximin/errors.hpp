#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace leximin {

/// Malformed input: dimension mismatches, out-of-range factors, schema violations.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point that was required to be feasible is not.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::size_t violated_index)
      : std::runtime_error(what), violated_index_(violated_index) {}

  // 1-based index of the first violated constraint (prefix length for P2-Comp).
  std::size_t violated_index() const noexcept { return violated_index_; }

 private:
  std::size_t violated_index_;
};

/// Solver-side failure: cycling guard, ill-configured ellipsoid, etc.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace leximin
