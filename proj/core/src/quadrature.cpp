#include "speclab/quadrature.hpp"

#include <cmath>
#include <vector>

#include "speclab/errors.hpp"

namespace speclab {

namespace {

// Initial partition: coarse panels both estimate the scale of the integral
// and seed the adaptive recursion, so a narrow peak inside a wide interval
// cannot slip between the first few Simpson nodes.
constexpr int kSeedPanels = 64;

struct SimpsonState {
  const std::function<double(double)>* f;
  double abs_tol;
};

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const SimpsonState& st, double a, double b, double fa, double fm, double fb,
             double whole, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = (*st.f)(lm);
  const double frm = (*st.f)(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  // Accept on tolerance, or when subdivision no longer makes progress at
  // floating-point resolution (sharply peaked integrands would otherwise
  // chase an unreachable absolute target).
  if (depth <= 0 || std::abs(delta) <= 15.0 * st.abs_tol ||
      std::abs(delta) <= 5e-15 * (std::abs(left) + std::abs(right)))
    return left + right + delta / 15.0;
  return adapt(st, a, m, fa, flm, fm, left, depth - 1) +
         adapt(st, m, b, fm, frm, fb, right, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 int max_depth) {
  if (!(b > a)) throw config_error("integrate: need b > a");

  const double h = (b - a) / kSeedPanels;
  std::vector<double> ends(kSeedPanels + 1), mids(kSeedPanels), panel(kSeedPanels);
  for (int i = 0; i <= kSeedPanels; ++i) ends[i] = f(i == kSeedPanels ? b : a + i * h);
  double scale = 0.0;
  for (int i = 0; i < kSeedPanels; ++i) {
    const double xa = a + i * h;
    const double xb = (i + 1 == kSeedPanels) ? b : a + (i + 1) * h;
    mids[i] = f(0.5 * (xa + xb));
    panel[i] = simpson(ends[i], mids[i], ends[i + 1], xb - xa);
    scale += panel[i];
  }

  SimpsonState st{&f, (std::abs(scale) * rel_tol + 1e-300) / kSeedPanels};
  double total = 0.0;
  for (int i = 0; i < kSeedPanels; ++i) {
    const double xa = a + i * h;
    const double xb = (i + 1 == kSeedPanels) ? b : a + (i + 1) * h;
    total += adapt(st, xa, xb, ends[i], mids[i], ends[i + 1], panel[i], max_depth);
  }
  if (!std::isfinite(total)) throw numerical_error("integrate: non-finite integral");
  return total;
}

double integrate_log_axis(const std::function<double(double)>& f, double t_lo, double t_hi,
                          double rel_tol) {
  auto g = [&f](double t) {
    const double r = std::exp(t);
    const double v = f(r) * r;
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate(g, t_lo, t_hi, rel_tol);
}

}  // namespace speclab
