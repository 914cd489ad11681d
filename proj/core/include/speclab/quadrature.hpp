#pragma once

#include <functional>

namespace speclab {

/// Adaptive Simpson quadrature of f over [a, b]. The tolerance is relative
/// to the running estimate of the whole integral, with a small absolute
/// floor so integrals near zero terminate.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, int max_depth = 48);

/// Integral of f over (0, infinity) through the substitution r = e^t, for
/// integrands that decay at both ends of the log axis. [t_lo, t_hi] bounds
/// the substituted variable.
double integrate_log_axis(const std::function<double(double)>& f, double t_lo, double t_hi,
                          double rel_tol = 1e-10);

}  // namespace speclab
