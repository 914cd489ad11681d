#include "speclab/grid.hpp"

#include <cmath>

#include "speclab/errors.hpp"

namespace speclab {

GridPtr make_grid(std::vector<double> points, std::vector<double> weights) {
  if (points.size() != weights.size())
    throw structural_error("make_grid: points and weights differ in length");
  if (points.size() < 2) throw structural_error("make_grid: need at least two points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i]) || !std::isfinite(weights[i]))
      throw structural_error("make_grid: non-finite entry");
    if (weights[i] <= 0.0) throw structural_error("make_grid: weights must be positive");
    if (i > 0 && !(points[i] > points[i - 1]))
      throw structural_error("make_grid: points must be strictly increasing");
  }
  auto g = std::make_shared<Grid1D>();
  g->points = std::move(points);
  g->weights = std::move(weights);
  return g;
}

GridPtr make_uniform_grid(double a, double b, std::size_t n_points) {
  if (!(b > a)) throw config_error("make_uniform_grid: need b > a");
  if (n_points < 2) throw config_error("make_uniform_grid: need at least two points");
  const double h = (b - a) / static_cast<double>(n_points - 1);
  std::vector<double> x(n_points), w(n_points, h);
  for (std::size_t i = 0; i < n_points; ++i) x[i] = a + static_cast<double>(i) * h;
  x.back() = b;  // avoid accumulated rounding at the right end
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return make_grid(std::move(x), std::move(w));
}

GridFunction make_grid_function(GridPtr grid, const std::function<double(double)>& f) {
  if (!grid) throw structural_error("make_grid_function: null grid");
  GridFunction out;
  out.grid = std::move(grid);
  out.values.resize(out.grid->size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = f(out.grid->points[i]);
    if (!std::isfinite(out.values[i]))
      throw domain_error("make_grid_function: non-finite sample");
  }
  return out;
}

GridFunction zero_function(GridPtr grid) {
  if (!grid) throw structural_error("zero_function: null grid");
  GridFunction out;
  out.values.assign(grid->size(), 0.0);
  out.grid = std::move(grid);
  return out;
}

bool same_grid(const GridFunction& f, const GridFunction& g) {
  if (!f.grid || !g.grid) return false;
  if (f.grid == g.grid) return true;
  return f.grid->points == g.grid->points && f.grid->weights == g.grid->weights;
}

std::size_t Window::count() const {
  std::size_t n = 0;
  for (auto m : mask) n += (m != 0);
  return n;
}

Window full_window(const GridPtr& grid) {
  if (!grid) throw structural_error("full_window: null grid");
  Window w;
  w.mask.assign(grid->size(), 1);
  return w;
}

Window interval_window(const GridPtr& grid, double lo, double hi) {
  if (!grid) throw structural_error("interval_window: null grid");
  if (!(lo <= hi)) throw config_error("interval_window: need lo <= hi");
  Window w;
  w.mask.resize(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double x = grid->points[i];
    w.mask[i] = (x >= lo && x <= hi) ? 1 : 0;
  }
  return w;
}

double inner_product(const GridFunction& f, const GridFunction& g) {
  if (!same_grid(f, g)) throw structural_error("inner_product: grid mismatch");
  double s = 0.0;
  const auto& w = f.grid->weights;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f.values[i] * g.values[i];
  return s;
}

double norm(const GridFunction& f) { return std::sqrt(inner_product(f, f)); }

double norm_on_window(const GridFunction& f, const Window& K) {
  if (!f.grid || K.mask.size() != f.grid->size())
    throw structural_error("norm_on_window: mask length does not match grid");
  if (K.count() == 0) throw domain_error("norm_on_window: empty window");
  double s = 0.0;
  const auto& w = f.grid->weights;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (K.mask[i]) s += w[i] * f.values[i] * f.values[i];
  return std::sqrt(s);
}

}  // namespace speclab
