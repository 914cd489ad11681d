#include "speclab/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "speclab/errors.hpp"
#include "speclab/rng.hpp"

namespace speclab {

namespace {

constexpr double kSturmPivotFloor = 1e-300;
constexpr std::uint64_t kInverseIterationSeed = 0x1c3b5a97ull;

void require_finite(const TridiagonalMatrix& T) {
  if (!T.offdiag.empty() && T.offdiag.size() + 1 != T.diag.size())
    throw structural_error("tridiag: off-diagonal must have size n-1 (or be empty)");
  if (T.diag.empty()) throw structural_error("tridiag: empty matrix");
  for (double d : T.diag)
    if (!std::isfinite(d)) throw structural_error("tridiag: non-finite diagonal entry");
  for (double e : T.offdiag)
    if (!std::isfinite(e)) throw structural_error("tridiag: non-finite off-diagonal entry");
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Solves (T - shift I) x = b by banded LU with partial pivoting. Row swaps
// introduce a second super-diagonal; pivots are floored and the back
// substitution rescales on growth, so near-singular shifts (the whole point
// of inverse iteration) stay finite.
std::vector<double> shifted_solve(const TridiagonalMatrix& T, double shift,
                                  std::vector<double> x, double pivot_floor) {
  const std::size_t m = T.size();
  std::vector<double> u0(m), u1(m, 0.0), u2(m, 0.0), low(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) u0[i] = T.diag[i] - shift;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    u1[i] = T.off(i);
    low[i] = T.off(i);
  }

  auto guard = [pivot_floor](double p) {
    if (std::abs(p) < pivot_floor) return p < 0.0 ? -pivot_floor : pivot_floor;
    return p;
  };

  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double sub = low[i];
    if (std::abs(u0[i]) >= std::abs(sub)) {
      const double l = sub / guard(u0[i]);
      u0[i + 1] -= l * u1[i];
      if (i + 2 < m) u1[i + 1] -= l * u2[i];
      x[i + 1] -= l * x[i];
    } else {
      // Swap rows i and i+1, then eliminate; |multiplier| <= 1 afterwards.
      const double r0 = u0[i], r1 = u1[i], r2 = u2[i];
      u0[i] = sub;
      u1[i] = u0[i + 1];
      u2[i] = (i + 2 < m) ? u1[i + 1] : 0.0;
      std::swap(x[i], x[i + 1]);
      const double l = r0 / guard(u0[i]);
      u0[i + 1] = r1 - l * u1[i];
      u1[i + 1] = ((i + 2 < m) ? r2 : 0.0) - l * u2[i];
      x[i + 1] -= l * x[i];
    }
  }

  constexpr double kBig = 1e250;
  for (std::size_t ri = m; ri-- > 0;) {
    double v = x[ri];
    if (ri + 1 < m) v -= u1[ri] * x[ri + 1];
    if (ri + 2 < m) v -= u2[ri] * x[ri + 2];
    v /= guard(u0[ri]);
    x[ri] = v;
    if (std::abs(v) > kBig) {
      for (std::size_t j = ri; j < m; ++j) x[j] *= 1.0 / kBig;
    }
  }
  return x;
}

std::vector<double> random_unit_vector(std::size_t m, std::uint64_t stream) {
  CounterRng rng(kInverseIterationSeed, stream);
  std::vector<double> v(m);
  for (auto& e : v) e = rng.gaussian();
  const double n = norm2(v);
  for (auto& e : v) e /= n;
  return v;
}

void normalize_by_max_then_unit(std::vector<double>& v) {
  double mx = 0.0;
  for (double e : v) mx = std::max(mx, std::abs(e));
  if (mx == 0.0) return;
  for (auto& e : v) e /= mx;
  const double n = norm2(v);
  for (auto& e : v) e /= n;
}

// Removes the components of v along each column in basis[first..last).
void orthogonalize_against(std::vector<double>& v,
                           const std::vector<std::vector<double>>& basis, std::size_t first,
                           std::size_t last) {
  for (std::size_t pass = 0; pass < 2; ++pass) {
    for (std::size_t j = first; j < last; ++j) {
      const double c = dot(v, basis[j]);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * basis[j][i];
    }
  }
}

}  // namespace

int sturm_count(const TridiagonalMatrix& T, double t) {
  if (!std::isfinite(t)) throw domain_error("sturm_count: shift must be finite");
  require_finite(T);
  double d = 1.0;
  int count = 0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    const double b = (i == 0) ? 0.0 : T.off(i - 1);
    d = (T.diag[i] - t) - b * b / d;
    if (std::abs(d) < kSturmPivotFloor) d = -kSturmPivotFloor;
    if (d < 0.0) ++count;
  }
  return count;
}

std::pair<double, double> gershgorin_bounds(const TridiagonalMatrix& T) {
  require_finite(T);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < T.size(); ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(T.off(i - 1));
    if (i + 1 < T.size()) r += std::abs(T.off(i));
    lo = std::min(lo, T.diag[i] - r);
    hi = std::max(hi, T.diag[i] + r);
  }
  return {lo, hi};
}

std::vector<double> tridiag_apply(const TridiagonalMatrix& T, const std::vector<double>& x) {
  if (x.size() != T.size()) throw structural_error("tridiag_apply: size mismatch");
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double v = T.diag[i] * x[i];
    if (i > 0) v += T.off(i - 1) * x[i - 1];
    if (i + 1 < x.size()) v += T.off(i) * x[i + 1];
    y[i] = v;
  }
  return y;
}

namespace {

// Bisects the Sturm count for eigenvalue index j (0-based, ascending) inside
// [a, b]; requires count(a) <= j < count(b).
double bisect_index(const TridiagonalMatrix& T, int j, double a, double b, double width_tol,
                    std::size_t cap) {
  std::size_t iters = 0;
  while (b - a > width_tol) {
    const double mid = a + 0.5 * (b - a);
    if (mid <= a || mid >= b) break;  // interval at floating-point resolution
    if (sturm_count(T, mid) <= j)
      a = mid;
    else
      b = mid;
    if (++iters > cap) {
      std::ostringstream msg;
      msg << "eigen bisection did not converge: index " << j << ", bracket [" << a << ", " << b
          << "], width " << (b - a) << " after " << cap << " iterations";
      throw numerical_error(msg.str());
    }
  }
  return a + 0.5 * (b - a);
}

EigenPairs solve_indices(const TridiagonalMatrix& T, int j_begin, int j_end, double lo,
                         double hi, const Tolerances& tol) {
  EigenPairs out;
  if (j_begin >= j_end) return out;

  const auto [glo, ghi] = gershgorin_bounds(T);
  const double scale = std::max({std::abs(glo), std::abs(ghi), 1.0});
  const double radius = ghi - glo;
  const double width_tol = tol.bisect_width_rel * std::max(radius, 1e-3 * scale);
  const double pad = 1e-12 * scale + 1e-300;

  const double a0 = std::max(lo, glo - pad);
  const double b0 = std::min(hi, ghi + pad);

  std::vector<double> approx(j_end - j_begin);
  for (int j = j_begin; j < j_end; ++j)
    approx[j - j_begin] = bisect_index(T, j, a0, b0, width_tol, tol.bisect_cap);

  const std::size_t m = T.size();
  const std::size_t n_found = approx.size();
  out.values.resize(n_found);
  out.vectors.assign(n_found, {});

  const double pivot_floor =
      std::max(kSturmPivotFloor, std::numeric_limits<double>::epsilon() * scale);

  std::size_t cluster_first = 0;
  for (std::size_t j = 0; j < n_found; ++j) {
    const bool in_cluster =
        j > 0 && approx[j] - approx[j - 1] < tol.cluster_gap_rel * (1.0 + std::abs(approx[j]));
    if (!in_cluster) cluster_first = j;

    std::vector<double> v;
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < 6 && !accepted; ++attempt) {
      v = random_unit_vector(m, static_cast<std::uint64_t>(j_begin + j) + 1000 * attempt);
      for (int sweep = 0; sweep < 3; ++sweep) {
        v = shifted_solve(T, approx[j], std::move(v), pivot_floor);
        if (j > cluster_first) orthogonalize_against(v, out.vectors, cluster_first, j);
        normalize_by_max_then_unit(v);
      }
      const double n = norm2(v);
      accepted = std::isfinite(n) && std::abs(n - 1.0) < 1e-6;
    }
    if (!accepted)
      throw numerical_error("inverse iteration failed to produce a unit eigenvector");

    // Rayleigh refinement; keep the bisected value if the quotient escapes
    // the bracket (it cannot for a converged vector, but stay safe).
    const double rayleigh = dot(v, tridiag_apply(T, v));
    if (std::abs(rayleigh - approx[j]) <= std::max(4.0 * width_tol, 1e-10 * scale))
      out.values[j] = rayleigh;
    else
      out.values[j] = approx[j];
    out.vectors[j] = std::move(v);
  }

  // Refinement can nudge near-equal values out of order; restore ordering.
  std::vector<std::size_t> perm(n_found);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return out.values[a] < out.values[b]; });
  EigenPairs sorted;
  sorted.values.reserve(n_found);
  sorted.vectors.reserve(n_found);
  for (auto p : perm) {
    sorted.values.push_back(out.values[p]);
    sorted.vectors.push_back(std::move(out.vectors[p]));
  }
  return sorted;
}

}  // namespace

EigenPairs eigen_range(const TridiagonalMatrix& T, double lo, double hi,
                       const Tolerances& tol) {
  if (!(lo < hi)) throw config_error("eigen_range: need lo < hi");
  require_finite(T);
  const int i0 = sturm_count(T, lo);
  const int i1 = sturm_count(T, hi);
  return solve_indices(T, i0, i1, lo, hi, tol);
}

EigenPairs eigen_smallest(const TridiagonalMatrix& T, std::size_t n, const Tolerances& tol) {
  require_finite(T);
  if (n == 0 || n > T.size())
    throw config_error("eigen_smallest: need 1 <= n <= matrix size");
  const auto [glo, ghi] = gershgorin_bounds(T);
  const double pad = 1e-9 * std::max({std::abs(glo), std::abs(ghi), 1.0}) + 1.0;
  return solve_indices(T, 0, static_cast<int>(n), glo - pad, ghi + pad, tol);
}

void validate_eigenpairs(const TridiagonalMatrix& T, const EigenPairs& pairs,
                         const Tolerances& tol) {
  for (std::size_t j = 0; j < pairs.count(); ++j) {
    if (j > 0 && pairs.values[j] < pairs.values[j - 1])
      throw numerical_error("eigenpairs: values not sorted");
    const auto& v = pairs.vectors[j];
    if (v.size() != T.size()) throw structural_error("eigenpairs: vector length mismatch");
    if (std::abs(norm2(v) - 1.0) > tol.eigen_unit_norm)
      throw numerical_error("eigenpairs: vector not unit norm");
    auto tv = tridiag_apply(T, v);
    double res = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double r = tv[i] - pairs.values[j] * v[i];
      res += r * r;
    }
    if (std::sqrt(res) > tol.eigen_residual * (1.0 + std::abs(pairs.values[j])))
      throw numerical_error("eigenpairs: residual too large");
    for (std::size_t k = 0; k < j; ++k)
      if (std::abs(dot(v, pairs.vectors[k])) > tol.eigen_ortho)
        throw numerical_error("eigenpairs: vectors not orthogonal");
  }
}

}  // namespace speclab
