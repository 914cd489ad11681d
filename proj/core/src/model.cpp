#include "speclab/model.hpp"

#include <cmath>
#include <sstream>

#include "speclab/errors.hpp"

namespace speclab {

std::size_t SpectralModel::total_modes() const {
  std::size_t n = 0;
  for (const auto& space : eigenspaces) n += space.size();
  return n;
}

double gram_defect(const SpectralModel& model) {
  std::vector<const GridFunction*> modes;
  for (const auto& space : model.eigenspaces)
    for (const auto& phi : space) modes.push_back(&phi);
  double defect = 0.0;
  for (std::size_t a = 0; a < modes.size(); ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const double g = inner_product(*modes[a], *modes[b]);
      const double want = (a == b) ? 1.0 : 0.0;
      defect = std::max(defect, std::abs(g - want));
    }
  }
  return defect;
}

void validate_model(const SpectralModel& model, const Tolerances& tol) {
  if (!model.grid) throw structural_error("model: null grid");
  if (model.eigenvalues.empty()) throw structural_error("model: no eigenvalues");
  if (model.eigenvalues.size() != model.eigenspaces.size())
    throw structural_error("model: eigenvalue/eigenspace count mismatch");
  for (std::size_t k = 0; k < model.eigenvalues.size(); ++k) {
    if (!(model.eigenvalues[k] >= 0.0))
      throw numerical_error("model: negative eigenvalue");
    if (k > 0 && !(model.eigenvalues[k] > model.eigenvalues[k - 1]))
      throw numerical_error("model: eigenvalues not strictly increasing");
    if (model.eigenspaces[k].empty())
      throw structural_error("model: empty eigenspace");
    for (const auto& phi : model.eigenspaces[k]) {
      const bool same = phi.grid == model.grid ||
                        (phi.grid && phi.grid->points == model.grid->points &&
                         phi.grid->weights == model.grid->weights);
      if (!same) throw structural_error("model: eigenfunction on foreign grid");
    }
  }
  const double defect = gram_defect(model);
  if (defect > tol.gram_defect) {
    std::ostringstream msg;
    msg << "model '" << model.label << "': orthonormality defect " << defect << " exceeds "
        << tol.gram_defect;
    throw numerical_error(msg.str());
  }
}

void validate_inverse_square(const PotentialSpec& spec, int dimension_n) {
  if (!spec.inverse_square_coeff) return;
  if (dimension_n < 3)
    throw config_error("inverse-square potential: dimension must be at least 3");
  const double floor = -0.25 * (dimension_n - 2.0) * (dimension_n - 2.0);
  if (!(*spec.inverse_square_coeff > floor)) {
    std::ostringstream msg;
    msg << "inverse-square coefficient " << *spec.inverse_square_coeff
        << " is not admissible in dimension " << dimension_n << " (needs c > " << floor << ")";
    throw config_error(msg.str());
  }
}

}  // namespace speclab
