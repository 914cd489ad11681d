#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "speclab/config.hpp"
#include "speclab/grid.hpp"

namespace speclab {

/// Finite spectral model of a non-negative self-adjoint operator: distinct
/// increasing eigenvalues, each carrying one or more orthonormal
/// eigenfunctions sampled on a common grid.
struct SpectralModel {
  GridPtr grid;
  std::vector<double> eigenvalues;                     // distinct, increasing, >= 0
  std::vector<std::vector<GridFunction>> eigenspaces;  // one block per eigenvalue
  std::string label;

  std::size_t distinct_count() const { return eigenvalues.size(); }
  std::size_t total_modes() const;
  double max_eigenvalue() const { return eigenvalues.back(); }
};

using ModelPtr = std::shared_ptr<const SpectralModel>;

/// Checks distinctness, non-negativity and quadrature orthonormality of the
/// eigenfunctions; throws numerical_error or structural_error on violation.
void validate_model(const SpectralModel& model, const Tolerances& tol = {});

/// Largest off-identity entry of the Gram matrix of all eigenfunctions.
double gram_defect(const SpectralModel& model);

/// A potential V together with the constants describing its growth
/// c (1+|x|)^k <= V(x) <= C (1+|x|)^k for |x| >= tail_radius, and the
/// optional inverse-square coefficient. The evaluator takes the signed
/// coordinate in one dimension and the radius in higher dimensions.
struct PotentialSpec {
  std::function<double(double)> evaluator;
  double growth_exponent = 0.0;  // k
  double lower_const = 0.0;      // c
  double upper_const = 0.0;      // C
  double tail_radius = 3.0;      // where the lower bound starts to apply
  std::optional<double> inverse_square_coeff;
  double support_radius = 1.0;  // bounding radius for integrable potentials
  std::string label;
};

/// Admissibility of an inverse-square coefficient in dimension n:
/// requires c > -(n-2)^2/4. Throws config_error otherwise.
void validate_inverse_square(const PotentialSpec& spec, int dimension_n);

}  // namespace speclab
