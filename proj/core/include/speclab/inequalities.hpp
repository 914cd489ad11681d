#pragma once

#include <cstdint>
#include <vector>

#include "speclab/model.hpp"
#include "speclab/report.hpp"
#include "speclab/spectral.hpp"

namespace speclab {

/// Partition of the spectral axis with boundaries k^(1/(2a)), k = 0..k_max;
/// block k is the half-open interval (boundary k, boundary k+1].
struct DyadicBlocking {
  double exponent_a = 0.0;
  std::vector<double> boundaries;
};

DyadicBlocking make_dyadic_blocking(double a, std::size_t k_max);

/// Boundary value k^(1/(2a)) without materializing the whole partition.
double dyadic_boundary(double a, std::uint64_t k);

/// Index of the block containing lambda, i.e. the k with
/// boundary(k) < lambda <= boundary(k+1). Throws config_error when lambda
/// exceeds the last boundary.
std::size_t block_index(const DyadicBlocking& blocking, double lambda);

/// Orthogonal-series maximal function bound: draws random orthonormal
/// families with random amplitudes in a finite-dimensional coordinate space,
/// forms the maximal function of the partial sums, and reports the largest
/// ratio of its squared norm to the log-squared-weighted sum of the squared
/// norms. Deterministic per (seed, trial).
InequalityReport rm_check(std::size_t n_funcs, std::size_t dim, std::size_t trials,
                          std::uint64_t seed, const CheckConfig& cfg = {});

/// Ratio for one explicit family (columns are the f_k in a coordinate
/// space). Exposed so degenerate families (single function, disjoint
/// supports) can be checked directly.
double rm_family_ratio(const std::vector<std::vector<double>>& family);

/// sup over k < k_max of boundary(k+1)^(2a-1) (boundary(k+1) - boundary(k)),
/// with a stabilization verdict over the last decade of k.
InequalityReport blocking_constant_check(double a, std::size_t k_max,
                                         const CheckConfig& cfg = {});

/// Empirical constant for the windowed maximal inequality: per trial, random
/// decaying coefficients; ratio of the squared windowed norm of the maximal
/// function to the squared log-weighted norm. The largest ratio using only
/// the lower half of the modes is compared with the full-model value; pass
/// means they agree within the stability tolerance.
InequalityReport maximal_inequality_check(const ModelPtr& model, const Window& K,
                                          std::size_t trials, std::uint64_t seed,
                                          double decay_s, const CheckConfig& cfg = {});

/// Sum over blocks of the squared windowed norm of the intra-block maximal
/// function (sup over truncations strictly inside each block), compared to
/// the squared coefficient norm.
InequalityReport intrablock_maximal_check(const ModelPtr& model,
                                          const DyadicBlocking& blocking, const Window& K,
                                          std::size_t trials, std::uint64_t seed,
                                          const CheckConfig& cfg = {});

enum class PlancherelMode {
  fixed_window,    // multiply by the given window, then filter
  shrinking_ball,  // per M, the window is the interval of radius 1/M at the window's center
};

/// For each M, the operator norm (on the modeled span) of "window then
/// band-filter", divided by the L^2[0,1] size of the rescaled filter; the
/// norms are fitted against M on log-log axes. Pass means the fit is a
/// credible power law (R^2 above threshold) or the norms are flat/bounded
/// (tail slope within tolerance). Bands containing no eigenvalue contribute
/// zero and are excluded from the fit.
InequalityReport plancherel_check(const ModelPtr& model, const Window& K,
                                  const std::vector<double>& M_list, int root_order,
                                  PlancherelMode mode, const CheckConfig& cfg = {});

/// Fits the distinct-eigenvalue index k against lambda_k on log-log axes and
/// verifies k <= (1+headroom) A lambda_k^a for all k past a small-index
/// cutoff (the underlying condition is asymptotic).
InequalityReport eigencount_condition_check(const ModelPtr& model,
                                            const CheckConfig& cfg = {});

/// Number of eigenvalues <= lam counted with multiplicity.
std::size_t weyl_count(const SpectralModel& model, double lam);

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo volume of {(xi, x) : |xi|^2 + V(x) <= lam} in dimension 2n,
/// over a bounding box derived from the growth lower bound. Deterministic
/// for a fixed seed. Requires the growth constants of V.
MonteCarloEstimate phase_space_volume(const PotentialSpec& V, double lam, int n,
                                      std::size_t n_samples, std::uint64_t seed);

/// Minimal Rayleigh quotient of the radial Hardy form over random smooth
/// test functions vanishing at zero and infinity; the bound is (n-2)^2/4.
InequalityReport hardy_check(int n, std::size_t trials, std::uint64_t seed,
                             const CheckConfig& cfg = {});

/// Rayleigh quotient of the near-extremal family sqrt(r) exp(-r^delta)
/// computed by quadrature; approaches the sharp constant as delta -> 0.
double hardy_near_extremal_quotient(double delta, int n = 3, double quad_rel_tol = 1e-10);

/// The two three-dimensional scattering-potential conditions, by Monte
/// Carlo with importance sampling near the kernel singularities:
///   I1 = Int |V(x)||V(y)| / |x-y|^2 < (4 pi)^2
///   sup_x I2(x),  I2(x) = Int |V(y)| / |x-y|  < 4 pi
/// Pass means each bound holds with three standard errors to spare. A
/// drifting running mean (non-integrable sample blowup) raises
/// numerical_error.
InequalityReport scattering_condition_check(const PotentialSpec& V, std::size_t n_samples,
                                            std::uint64_t seed, const CheckConfig& cfg = {});

/// The sup_x estimate alone (used for threshold searches over the potential
/// amplitude). When argmax_radius is given it receives the distance from the
/// origin of the maximizing candidate center.
MonteCarloEstimate scattering_i2_sup(const PotentialSpec& V, std::size_t n_samples,
                                     std::uint64_t seed, const CheckConfig& cfg = {},
                                     double* argmax_radius = nullptr);

}  // namespace speclab
