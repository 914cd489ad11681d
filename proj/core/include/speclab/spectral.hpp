#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include "speclab/model.hpp"

namespace speclab {

/// Eigenspace coefficients of one function against a model: coeffs[k][i] is
/// the quadrature inner product with eigenfunction i of eigenvalue k.
struct SpectralCoefficients {
  ModelPtr model;
  std::vector<std::vector<double>> coeffs;

  std::size_t total_size() const;
};

/// Spectral multiplier with compact support and a root order: applied to an
/// eigenvalue lambda it evaluates f(lambda^(1/m)), and is forced to zero
/// whenever lambda^(1/m) falls outside [support_lo, support_hi].
struct BandFilter {
  std::function<double(double)> f;
  double support_lo = 0.0;
  double support_hi = std::numeric_limits<double>::infinity();
  int root_order = 1;

  double operator()(double lambda) const;
};

BandFilter indicator_band(double lo, double hi, int root_order = 1);

/// Expands f in the model's eigenfunctions. Structural error on grid mismatch.
SpectralCoefficients analyze(const ModelPtr& model, const GridFunction& f);

/// Sum of all modeled contributions, i.e. the projection onto the span.
GridFunction synthesize(const SpectralCoefficients& c);

/// Truncated expansion over eigenvalues <= R: a right-continuous step
/// function of R whose jumps sit exactly at the eigenvalues. Summation runs
/// over eigenvalues in ascending order, one eigenspace member at a time;
/// this order is part of the contract (maxima must be bit-reproducible).
GridFunction partial_sum(const SpectralCoefficients& c, double R);

/// Coefficient-wise application of the multiplier.
SpectralCoefficients apply_multiplier(const SpectralCoefficients& c, const BandFilter& F);

/// Pointwise maximum of |partial sums| over every truncation level up to
/// R_max. Since partial sums jump only at eigenvalues, the maximum over the
/// finitely many jump levels (plus the empty sum) is exact for the supremum
/// over all real thresholds.
GridFunction maximal_function(const SpectralCoefficients& c, double R_max);

/// Keeps the modes with lo < eigenvalue <= hi (left-open, right-closed).
SpectralCoefficients band_projector(const SpectralCoefficients& c, double lo, double hi);

/// (sum over modes of (log(2 + lambda))^2 c^2)^(1/2).
double log_weighted_norm(const SpectralCoefficients& c);

/// Euclidean norm of the coefficients; equals the function norm when the
/// function lies in the modeled span.
double coefficient_norm(const SpectralCoefficients& c);

/// Independent Gaussian coefficients scaled by the decay profile k^(-s)
/// (k is the 1-based distinct-eigenvalue index). Fully determined by
/// (seed, stream).
SpectralCoefficients random_coefficients(const ModelPtr& model, std::uint64_t seed,
                                         std::uint64_t stream, double decay_s);

}  // namespace speclab
