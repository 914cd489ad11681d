#pragma once

#include <stdexcept>
#include <string>

namespace speclab {

/// Two objects that must share structure (grids, coefficient shapes) do not.
struct structural_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A value lies outside the mathematical domain of an operation.
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// A requested configuration violates a guard or precondition.
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An iterative method failed to converge or an estimate diverged.
/// The message carries diagnostics (iteration counts, residuals).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace speclab
