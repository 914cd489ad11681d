#include "speclab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "speclab/errors.hpp"
#include "speclab/rng.hpp"

namespace speclab {

std::size_t SpectralCoefficients::total_size() const {
  std::size_t n = 0;
  for (const auto& block : coeffs) n += block.size();
  return n;
}

double BandFilter::operator()(double lambda) const {
  const double t = root_order == 1 ? lambda : std::pow(lambda, 1.0 / root_order);
  if (t < support_lo || t > support_hi) return 0.0;
  return f ? f(t) : 0.0;
}

BandFilter indicator_band(double lo, double hi, int root_order) {
  if (root_order < 1) throw config_error("indicator_band: root order must be >= 1");
  BandFilter F;
  F.f = [](double) { return 1.0; };
  F.support_lo = lo;
  F.support_hi = hi;
  F.root_order = root_order;
  return F;
}

namespace {

void check_shape(const SpectralCoefficients& c) {
  if (!c.model) throw structural_error("coefficients: null model");
  if (c.coeffs.size() != c.model->distinct_count())
    throw structural_error("coefficients: block count does not match model");
  for (std::size_t k = 0; k < c.coeffs.size(); ++k)
    if (c.coeffs[k].size() != c.model->eigenspaces[k].size())
      throw structural_error("coefficients: block size does not match eigenspace");
}

}  // namespace

SpectralCoefficients analyze(const ModelPtr& model, const GridFunction& f) {
  if (!model) throw structural_error("analyze: null model");
  SpectralCoefficients c;
  c.model = model;
  c.coeffs.resize(model->distinct_count());
  for (std::size_t k = 0; k < model->distinct_count(); ++k) {
    const auto& space = model->eigenspaces[k];
    c.coeffs[k].resize(space.size());
    for (std::size_t i = 0; i < space.size(); ++i)
      c.coeffs[k][i] = inner_product(f, space[i]);
  }
  return c;
}

GridFunction partial_sum(const SpectralCoefficients& c, double R) {
  if (!(R >= 0.0)) throw config_error("partial_sum: need R >= 0");
  check_shape(c);
  GridFunction out = zero_function(c.model->grid);
  for (std::size_t k = 0; k < c.coeffs.size(); ++k) {
    if (c.model->eigenvalues[k] > R) break;
    for (std::size_t i = 0; i < c.coeffs[k].size(); ++i) {
      const double a = c.coeffs[k][i];
      const auto& phi = c.model->eigenspaces[k][i].values;
      for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] += a * phi[j];
    }
  }
  return out;
}

GridFunction synthesize(const SpectralCoefficients& c) {
  check_shape(c);
  return partial_sum(c, std::numeric_limits<double>::infinity());
}

SpectralCoefficients apply_multiplier(const SpectralCoefficients& c, const BandFilter& F) {
  check_shape(c);
  if (F.root_order < 1) throw config_error("apply_multiplier: root order must be >= 1");
  SpectralCoefficients out = c;
  for (std::size_t k = 0; k < out.coeffs.size(); ++k) {
    const double w = F(c.model->eigenvalues[k]);
    for (auto& a : out.coeffs[k]) a *= w;
  }
  return out;
}

GridFunction maximal_function(const SpectralCoefficients& c, double R_max) {
  check_shape(c);
  if (!(R_max >= c.model->eigenvalues.front()))
    throw config_error("maximal_function: R_max below the first eigenvalue");

  const std::size_t n = c.model->grid->size();
  std::vector<double> running(n, 0.0);
  GridFunction out = zero_function(c.model->grid);  // the empty sum
  for (std::size_t k = 0; k < c.coeffs.size(); ++k) {
    if (c.model->eigenvalues[k] > R_max) break;
    for (std::size_t i = 0; i < c.coeffs[k].size(); ++i) {
      const double a = c.coeffs[k][i];
      const auto& phi = c.model->eigenspaces[k][i].values;
      for (std::size_t j = 0; j < n; ++j) running[j] += a * phi[j];
    }
    // Partial sums change only when a whole eigenspace has been added.
    for (std::size_t j = 0; j < n; ++j)
      out.values[j] = std::max(out.values[j], std::abs(running[j]));
  }
  return out;
}

SpectralCoefficients band_projector(const SpectralCoefficients& c, double lo, double hi) {
  if (!(lo <= hi)) throw config_error("band_projector: need lo <= hi");
  check_shape(c);
  SpectralCoefficients out = c;
  for (std::size_t k = 0; k < out.coeffs.size(); ++k) {
    const double lam = c.model->eigenvalues[k];
    if (!(lam > lo && lam <= hi))
      std::fill(out.coeffs[k].begin(), out.coeffs[k].end(), 0.0);
  }
  return out;
}

double log_weighted_norm(const SpectralCoefficients& c) {
  check_shape(c);
  double s = 0.0;
  for (std::size_t k = 0; k < c.coeffs.size(); ++k) {
    const double w = std::log(2.0 + c.model->eigenvalues[k]);
    for (double a : c.coeffs[k]) s += w * w * a * a;
  }
  return std::sqrt(s);
}

double coefficient_norm(const SpectralCoefficients& c) {
  check_shape(c);
  double s = 0.0;
  for (const auto& block : c.coeffs)
    for (double a : block) s += a * a;
  return std::sqrt(s);
}

SpectralCoefficients random_coefficients(const ModelPtr& model, std::uint64_t seed,
                                         std::uint64_t stream, double decay_s) {
  if (!model) throw structural_error("random_coefficients: null model");
  CounterRng rng(seed, stream);
  SpectralCoefficients c;
  c.model = model;
  c.coeffs.resize(model->distinct_count());
  for (std::size_t k = 0; k < model->distinct_count(); ++k) {
    const double scale = std::pow(static_cast<double>(k + 1), -decay_s);
    c.coeffs[k].resize(model->eigenspaces[k].size());
    for (auto& a : c.coeffs[k]) a = scale * rng.gaussian();
  }
  return c;
}

}  // namespace speclab
