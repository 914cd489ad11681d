#pragma once

#include <iosfwd>
#include <string>

#include "speclab/model.hpp"

namespace speclab {

/// Writes a model as a text artifact: one header line (label, grid size,
/// mode count) followed by CSV blocks for the eigenvalues and the
/// eigenfunction samples. Numbers use the shortest round-trip form, so
/// import followed by export reproduces the file byte for byte.
void export_model(const SpectralModel& model, std::ostream& out);

SpectralModel import_model(std::istream& in);

void export_model_file(const SpectralModel& model, const std::string& path);
SpectralModel import_model_file(const std::string& path);

/// Coefficients as CSV rows (k, i, lambda, coeff).
void export_coefficients_csv(const struct SpectralCoefficients& c, std::ostream& out);

/// Sampled function as CSV rows (x, value).
void export_function_csv(const GridFunction& f, std::ostream& out);

}  // namespace speclab
