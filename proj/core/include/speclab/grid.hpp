#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace speclab {

/// One-dimensional quadrature grid: strictly increasing nodes with positive
/// weights. The weights realize the measure; inner products, norms and
/// expansions all go through them.
struct Grid1D {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  double span() const { return points.back() - points.front(); }
};

using GridPtr = std::shared_ptr<const Grid1D>;

/// Validates and freezes a grid. Throws structural_error on length mismatch,
/// non-increasing points, non-positive weights or non-finite entries.
GridPtr make_grid(std::vector<double> points, std::vector<double> weights);

/// Uniform grid on [a, b] with trapezoid weights (half weight at the ends).
GridPtr make_uniform_grid(double a, double b, std::size_t n_points);

/// Real samples of a function, one value per grid point.
struct GridFunction {
  GridPtr grid;
  std::vector<double> values;
};

GridFunction make_grid_function(GridPtr grid, const std::function<double(double)>& f);
GridFunction zero_function(GridPtr grid);

bool same_grid(const GridFunction& f, const GridFunction& g);

/// Boolean mask selecting a compact subset of grid points.
struct Window {
  std::vector<std::uint8_t> mask;

  std::size_t count() const;
};

Window full_window(const GridPtr& grid);

/// Mask of points x with lo <= x <= hi.
Window interval_window(const GridPtr& grid, double lo, double hi);

/// Quadrature inner product sum_j w_j f_j g_j. Structural error if the two
/// functions do not live on the same grid.
double inner_product(const GridFunction& f, const GridFunction& g);

double norm(const GridFunction& f);

/// Windowed L2 norm (sum_{j in K} w_j f_j^2)^{1/2}. Equals the full norm
/// when the window selects everything; empty windows are a domain error.
double norm_on_window(const GridFunction& f, const Window& K);

}  // namespace speclab
