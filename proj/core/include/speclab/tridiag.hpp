#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "speclab/config.hpp"

namespace speclab {

/// Symmetric tridiagonal matrix; only one off-diagonal is stored. The
/// off-diagonal may be empty, meaning all couplings are zero.
struct TridiagonalMatrix {
  std::vector<double> diag;
  std::vector<double> offdiag;

  std::size_t size() const { return diag.size(); }
  double off(std::size_t i) const { return offdiag.empty() ? 0.0 : offdiag[i]; }
};

/// Eigenvalues in non-decreasing order with orthonormal eigenvectors,
/// one column per value.
struct EigenPairs {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;

  std::size_t count() const { return values.size(); }
};

/// Number of eigenvalues of T strictly less than t, by the Sturm pivot-sign
/// recurrence with the classic tiny-pivot safeguard.
int sturm_count(const TridiagonalMatrix& T, double t);

/// Enclosing interval [lo, hi] for the spectrum from Gershgorin discs.
std::pair<double, double> gershgorin_bounds(const TridiagonalMatrix& T);

/// All eigenpairs with eigenvalue in [lo, hi). Eigenvalues are located by
/// bisection on the Sturm count, refined by a Rayleigh quotient; vectors by
/// inverse iteration with reorthogonalization inside clusters. Deterministic:
/// the starting vector of index j is a fixed pseudo-random stream keyed by j.
EigenPairs eigen_range(const TridiagonalMatrix& T, double lo, double hi,
                       const Tolerances& tol = {});

/// The n smallest eigenpairs.
EigenPairs eigen_smallest(const TridiagonalMatrix& T, std::size_t n,
                          const Tolerances& tol = {});

/// Throws numerical_error unless every pair satisfies the residual,
/// orthogonality and unit-norm contracts.
void validate_eigenpairs(const TridiagonalMatrix& T, const EigenPairs& pairs,
                         const Tolerances& tol = {});

/// y = T x.
std::vector<double> tridiag_apply(const TridiagonalMatrix& T, const std::vector<double>& x);

}  // namespace speclab
