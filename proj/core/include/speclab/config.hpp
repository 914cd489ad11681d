#pragma once

#include <cstddef>

namespace speclab {

/// Central record of numerical tolerances. Everything that asserts a
/// structural property (orthonormality, residuals, merge thresholds) reads
/// its constant from here, so an experiment can tighten or loosen one knob
/// in one place.
struct Tolerances {
  double gram_defect = 5e-7;       // allowed orthonormality defect of a model
  double parseval_defect = 1e-8;   // relative Parseval defect for in-span functions
  double eigen_merge_rel = 1e-9;   // merge eigenvalues closer than this, relative
  double eigen_residual = 1e-8;    // ||Tv - lambda v|| <= tol * (1 + |lambda|)
  double eigen_ortho = 1e-8;       // allowed pairwise dot product of eigenvectors
  double eigen_unit_norm = 1e-10;  // allowed deviation of eigenvector norms from 1
  double bisect_width_rel = 1e-12; // bracket width relative to the Gershgorin radius
  std::size_t bisect_cap = 200;    // bisection iterations before numerical_error
  double cluster_gap_rel = 1e-8;   // relative gap that defines an eigenvalue cluster
};

/// Thresholds and ceilings used by the inequality checkers. The underlying
/// estimates guarantee existence of constants, not their values, so "pass"
/// is always relative to these configured defaults.
struct CheckConfig {
  double ratio_ceiling = 10.0;          // ceiling for empirical max ratios
  double stability_tol = 0.25;          // agreement required when mode count doubles
  double r2_threshold = 0.9;            // log-log fit quality for power-law classification
  double flat_slope_tol = 0.1;          // |slope| over the top half of M classifying flat norms
  double power_iter_tol = 1e-10;        // Rayleigh quotient convergence tolerance
  std::size_t power_iter_cap = 10000;   // power iterations before numerical_error
  double hardy_slack = 1e-3;            // allowed relative slack below the Hardy constant
  double blocking_stability_tol = 1e-6; // sup increments allowed over the last decade of k
  double eigencount_inflation = 0.05;   // headroom applied to the fitted constant
  std::size_t eigencount_min_index = 4; // eigenvalue-count condition enforced for k >= this
  double growth_slope_band = 0.5;       // admissible log-log slope band in growth validation
  double quad_rel_tol = 1e-10;          // adaptive quadrature relative tolerance
  double decay_default = 1.0;           // default k^{-s} coefficient decay exponent
  double mc_drift_sigmas = 5.0;         // mean drift (in std errors) that flags divergence
};

}  // namespace speclab
