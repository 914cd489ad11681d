#pragma once

#include <cstddef>

#include "speclab/model.hpp"
#include "speclab/report.hpp"

namespace speclab {

/// Second-derivative operator with zero boundary values on [0, length]:
/// eigenvalues (k pi / length)^2 with sine eigenfunctions, k = 1..n_modes,
/// sampled on a uniform grid of n_points. Requires n_points >= 8 n_modes.
SpectralModel build_dirichlet_1d(double length, std::size_t n_modes, std::size_t n_points);

/// Harmonic oscillator -u'' + x^2 u on a truncation box chosen from the
/// classical turning point: eigenvalues 2k+1, eigenfunctions by the
/// normalized three-term recurrence. Requires n_points >= 16 n_modes.
SpectralModel build_hermite_1d(std::size_t n_modes, std::size_t n_points);

/// Second-order central-difference discretization of -u'' + V(x) u with zero
/// boundary values on [a, b]; the lowest n_modes eigenpairs are solved by
/// the tridiagonal eigensolver, normalized under the grid quadrature, and
/// near-equal eigenvalues are merged into one eigenspace.
SpectralModel build_schrodinger_fd(const PotentialSpec& V, double a, double b,
                                   std::size_t n_points, std::size_t n_modes,
                                   const Tolerances& tol = {});

/// Samples V across the domain and tests whether it is squeezed between
/// c (1+|x|)^k and C (1+|x|)^k beyond the tail radius: reports the tightest
/// admissible constants and a pass flag based on the tail trend of
/// V / (1+|x|)^k (a decaying trend defeats any fixed lower constant, a
/// growing one defeats any fixed upper constant).
InequalityReport validate_growth_conditions(const PotentialSpec& V, double a, double b,
                                            std::size_t samples,
                                            const CheckConfig& cfg = {});

}  // namespace speclab
