#include "speclab/model_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "speclab/errors.hpp"
#include "speclab/report.hpp"
#include "speclab/spectral.hpp"

namespace speclab {

namespace {

constexpr const char* kMagic = "speclab-model";
constexpr int kFormatVersion = 1;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string next_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line))
    throw structural_error(std::string("import_model: truncated file, expected ") + what);
  return line;
}

}  // namespace

void export_model(const SpectralModel& model, std::ostream& out) {
  if (model.label.find_first_of(" \t\n,") != std::string::npos)
    throw structural_error("export_model: label must be a single token");
  out << kMagic << ' ' << kFormatVersion << ' ' << model.label << ' ' << model.grid->size()
      << ' ' << model.distinct_count() << '\n';

  out << "eigenvalues k,lambda,multiplicity\n";
  for (std::size_t k = 0; k < model.distinct_count(); ++k)
    out << (k + 1) << ',' << format_double(model.eigenvalues[k]) << ','
        << model.eigenspaces[k].size() << '\n';

  out << "samples x,weight,modes\n";
  for (std::size_t j = 0; j < model.grid->size(); ++j) {
    out << format_double(model.grid->points[j]) << ','
        << format_double(model.grid->weights[j]);
    for (const auto& space : model.eigenspaces)
      for (const auto& phi : space) out << ',' << format_double(phi.values[j]);
    out << '\n';
  }
}

SpectralModel import_model(std::istream& in) {
  std::string magic, label;
  int version = 0;
  std::size_t n_points = 0, n_distinct = 0;
  {
    std::istringstream header(next_line(in, "header"));
    header >> magic >> version >> label >> n_points >> n_distinct;
    if (magic != kMagic || !header)
      throw structural_error("import_model: bad header line");
    if (version != kFormatVersion)
      throw structural_error("import_model: unsupported format version");
  }

  if (next_line(in, "eigenvalues block") != "eigenvalues k,lambda,multiplicity")
    throw structural_error("import_model: missing eigenvalues block");

  std::vector<double> eigenvalues(n_distinct);
  std::vector<std::size_t> multiplicity(n_distinct);
  std::size_t total_modes = 0;
  for (std::size_t k = 0; k < n_distinct; ++k) {
    const auto fields = split_csv(next_line(in, "eigenvalue row"));
    if (fields.size() != 3) throw structural_error("import_model: bad eigenvalue row");
    eigenvalues[k] = parse_double(fields[1]);
    multiplicity[k] = static_cast<std::size_t>(std::stoull(fields[2]));
    total_modes += multiplicity[k];
  }

  if (next_line(in, "samples block") != "samples x,weight,modes")
    throw structural_error("import_model: missing samples block");

  std::vector<double> points(n_points), weights(n_points);
  std::vector<std::vector<double>> columns(total_modes, std::vector<double>(n_points));
  for (std::size_t j = 0; j < n_points; ++j) {
    const auto fields = split_csv(next_line(in, "sample row"));
    if (fields.size() != 2 + total_modes)
      throw structural_error("import_model: bad sample row width");
    points[j] = parse_double(fields[0]);
    weights[j] = parse_double(fields[1]);
    for (std::size_t c = 0; c < total_modes; ++c)
      columns[c][j] = parse_double(fields[2 + c]);
  }

  SpectralModel model;
  model.label = label;
  model.grid = make_grid(std::move(points), std::move(weights));
  model.eigenvalues = std::move(eigenvalues);
  std::size_t col = 0;
  for (std::size_t k = 0; k < n_distinct; ++k) {
    std::vector<GridFunction> space;
    for (std::size_t i = 0; i < multiplicity[k]; ++i)
      space.push_back(GridFunction{model.grid, std::move(columns[col++])});
    model.eigenspaces.push_back(std::move(space));
  }
  return model;
}

void export_model_file(const SpectralModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("export_model_file: cannot open " + path);
  export_model(model, out);
}

SpectralModel import_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("import_model_file: cannot open " + path);
  return import_model(in);
}

void export_coefficients_csv(const SpectralCoefficients& c, std::ostream& out) {
  out << "k,i,lambda,coeff\n";
  for (std::size_t k = 0; k < c.coeffs.size(); ++k)
    for (std::size_t i = 0; i < c.coeffs[k].size(); ++i)
      out << (k + 1) << ',' << (i + 1) << ',' << format_double(c.model->eigenvalues[k]) << ','
          << format_double(c.coeffs[k][i]) << '\n';
}

void export_function_csv(const GridFunction& f, std::ostream& out) {
  out << "x,value\n";
  for (std::size_t j = 0; j < f.values.size(); ++j)
    out << format_double(f.grid->points[j]) << ',' << format_double(f.values[j]) << '\n';
}

}  // namespace speclab
