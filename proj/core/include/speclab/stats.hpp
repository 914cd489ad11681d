#pragma once

#include <cstddef>
#include <vector>

namespace speclab {

/// Ordinary least squares line fit with the coefficient of determination.
/// A constant response (zero total variance) reports r_squared = 1 and
/// slope 0: a flat line explains flat data perfectly.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  std::size_t n = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Welford running mean/variance accumulator for Monte Carlo estimates.
class RunningStats {
 public:
  void add(double v);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;
  double std_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace speclab
