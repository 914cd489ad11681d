#include "speclab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "speclab/errors.hpp"
#include "speclab/stats.hpp"
#include "speclab/tridiag.hpp"

namespace speclab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void renormalize(GridFunction& phi) {
  const double n = norm(phi);
  if (!(n > 0.0)) throw numerical_error("eigenfunction with zero quadrature norm");
  for (auto& v : phi.values) v /= n;
}

}  // namespace

SpectralModel build_dirichlet_1d(double length, std::size_t n_modes, std::size_t n_points) {
  if (!(length > 0.0)) throw config_error("build_dirichlet_1d: length must be positive");
  if (n_modes < 1) throw config_error("build_dirichlet_1d: need at least one mode");
  if (n_points < 8 * n_modes)
    throw config_error("build_dirichlet_1d: resolution guard wants n_points >= 8 n_modes");

  SpectralModel model;
  model.label = "dirichlet";
  model.grid = make_uniform_grid(0.0, length, n_points);

  // The frequency ratio pi/length is computed once so that length == pi
  // yields exactly 1 and eigenvalues land on exact integers k^2.
  const double ratio = kPi / length;
  const double amp = std::sqrt(2.0 / length);
  for (std::size_t k = 1; k <= n_modes; ++k) {
    const double omega = static_cast<double>(k) * ratio;
    model.eigenvalues.push_back(omega * omega);
    GridFunction phi = make_grid_function(
        model.grid, [omega, amp](double x) { return amp * std::sin(omega * x); });
    renormalize(phi);
    model.eigenspaces.push_back({std::move(phi)});
  }
  return model;
}

SpectralModel build_hermite_1d(std::size_t n_modes, std::size_t n_points) {
  if (n_modes < 1) throw config_error("build_hermite_1d: need at least one mode");
  if (n_points < 16 * n_modes)
    throw config_error("build_hermite_1d: resolution guard wants n_points >= 16 n_modes");

  // Classical turning point of the top mode plus eight units of Gaussian
  // decay, so the truncated tails are far below the quadrature tolerance.
  const double box = std::sqrt(2.0 * (2.0 * static_cast<double>(n_modes) + 1.0)) + 8.0;

  SpectralModel model;
  model.label = "hermite";
  model.grid = make_uniform_grid(-box, box, n_points);

  const std::size_t n = model.grid->size();
  std::vector<double> prev(n, 0.0), cur(n), next(n);
  const double ground_amp = std::pow(kPi, -0.25);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = model.grid->points[i];
    cur[i] = ground_amp * std::exp(-0.5 * x * x);
  }

  for (std::size_t k = 0; k < n_modes; ++k) {
    model.eigenvalues.push_back(static_cast<double>(2 * k + 1));
    GridFunction phi{model.grid, cur};
    renormalize(phi);
    model.eigenspaces.push_back({std::move(phi)});

    const double kd = static_cast<double>(k);
    const double c1 = std::sqrt(2.0 / (kd + 1.0));
    const double c0 = std::sqrt(kd / (kd + 1.0));
    for (std::size_t i = 0; i < n; ++i) {
      const double x = model.grid->points[i];
      next[i] = x * c1 * cur[i] - c0 * prev[i];
    }
    prev.swap(cur);
    cur.swap(next);
  }
  return model;
}

SpectralModel build_schrodinger_fd(const PotentialSpec& V, double a, double b,
                                   std::size_t n_points, std::size_t n_modes,
                                   const Tolerances& tol) {
  if (!(b > a)) throw config_error("build_schrodinger_fd: need b > a");
  if (n_modes < 1) throw config_error("build_schrodinger_fd: need at least one mode");
  if (!(n_modes < n_points / 4))
    throw config_error("build_schrodinger_fd: need n_modes < n_points / 4");
  if (!V.evaluator) throw config_error("build_schrodinger_fd: potential has no evaluator");

  auto grid = make_uniform_grid(a, b, n_points);
  const double h = (b - a) / static_cast<double>(n_points - 1);
  const std::size_t m = n_points - 2;  // interior unknowns

  TridiagonalMatrix T;
  T.diag.resize(m);
  T.offdiag.assign(m - 1, -1.0 / (h * h));
  for (std::size_t i = 0; i < m; ++i) {
    const double x = grid->points[i + 1];
    const double v = V.evaluator(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "potential evaluates to a non-finite value at x = " << x;
      throw domain_error(msg.str());
    }
    T.diag[i] = 2.0 / (h * h) + v;
  }

  EigenPairs pairs = eigen_smallest(T, n_modes, tol);

  SpectralModel model;
  model.label = V.label.empty() ? "schrodinger" : "schrodinger:" + V.label;
  model.grid = grid;
  for (std::size_t j = 0; j < pairs.count(); ++j) {
    GridFunction phi = zero_function(grid);
    for (std::size_t i = 0; i < m; ++i) phi.values[i + 1] = pairs.vectors[j][i];
    renormalize(phi);

    const double lam = pairs.values[j];
    const bool merge = !model.eigenvalues.empty() &&
                       lam - model.eigenvalues.back() <
                           tol.eigen_merge_rel * (1.0 + std::abs(lam));
    if (merge)
      model.eigenspaces.back().push_back(std::move(phi));
    else {
      model.eigenvalues.push_back(lam);
      model.eigenspaces.push_back({std::move(phi)});
    }
  }
  return model;
}

InequalityReport validate_growth_conditions(const PotentialSpec& V, double a, double b,
                                            std::size_t samples, const CheckConfig& cfg) {
  if (samples < 100) throw config_error("validate_growth_conditions: need samples >= 100");
  if (!(b > a)) throw config_error("validate_growth_conditions: need b > a");
  if (!V.evaluator) throw config_error("validate_growth_conditions: no evaluator");

  const double k = V.growth_exponent;
  const double R = V.tail_radius;

  double c_tight = std::numeric_limits<double>::infinity();
  double upper_tight = 0.0;
  std::vector<double> tail_logx, tail_logq;
  bool tail_positive = true;
  std::size_t tail_count = 0;

  for (std::size_t i = 0; i < samples; ++i) {
    const double x = a + (b - a) * (static_cast<double>(i) + 0.5) /
                             static_cast<double>(samples);
    const double v = V.evaluator(x);
    if (!std::isfinite(v)) throw domain_error("validate_growth_conditions: non-finite V");
    const double env = std::pow(1.0 + std::abs(x), k);
    upper_tight = std::max(upper_tight, std::abs(v) / env);
    if (std::abs(x) >= R) {
      ++tail_count;
      const double q = v / env;
      c_tight = std::min(c_tight, q);
      if (v > 0.0) {
        tail_logx.push_back(std::log(1.0 + std::abs(x)));
        tail_logq.push_back(std::log(q));
      } else {
        tail_positive = false;
      }
    }
  }
  if (tail_count == 0)
    throw config_error("validate_growth_conditions: domain has no points beyond the tail radius");

  // The ratio q = V/(1+|x|)^k must neither decay (no fixed lower constant
  // survives) nor grow (no fixed upper constant survives). The band absorbs
  // the finite-domain bias of the envelope.
  double slope = 0.0;
  bool lower_ok = tail_positive;
  bool upper_ok = true;
  if (tail_positive && tail_logx.size() >= 2) {
    slope = fit_line(tail_logx, tail_logq).slope;
    lower_ok = slope >= -cfg.growth_slope_band;
    upper_ok = slope <= cfg.growth_slope_band;
  }

  InequalityReport report;
  report.name = "growth";
  report.lhs = (tail_count > 0 && c_tight < std::numeric_limits<double>::infinity())
                   ? c_tight
                   : 0.0;
  report.rhs = upper_tight;
  report.ratio = report.rhs > 0.0 ? report.lhs / report.rhs : 0.0;
  report.fitted_constant = report.lhs;
  report.fitted_exponent = k + slope;  // effective tail growth exponent
  report.pass = lower_ok && upper_ok && report.lhs > 0.0;
  report.sizes["samples"] = static_cast<double>(samples);
  report.tolerances["slope_band"] = cfg.growth_slope_band;
  report.metadata["tail_slope"] = slope;
  report.metadata["tail_points"] = static_cast<double>(tail_count);
  report.metadata["exponent_k"] = k;
  report.metadata["tail_radius"] = R;
  report.metadata["lower_ok"] = lower_ok ? 1.0 : 0.0;
  report.metadata["upper_ok"] = upper_ok ? 1.0 : 0.0;
  return report;
}

}  // namespace speclab
