// speclab: build finite spectral models, expand functions in their
// eigenbases, and run the empirical inequality checks, emitting JSON
// reports and CSV data for batch experiments.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "speclab/errors.hpp"
#include "speclab/inequalities.hpp"
#include "speclab/model_io.hpp"
#include "speclab/operators.hpp"
#include "speclab/report.hpp"
#include "speclab/spectral.hpp"
#include "speclab/stats.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr double kPi = 3.14159265358979323846;

int run_cli(const std::vector<std::string>& args);

// ---------------------------------------------------------------------------
// Option bundles

struct ModelOpts {
  std::string model = "dirichlet";
  std::string length = "pi";
  std::size_t modes = 64;
  std::size_t points = 0;  // 0 = choose from the mode count
  std::string potential = "harmonic";
  double coefficient = 1.0;
  double growth_k = 2.0;
  double domain_lo = std::numeric_limits<double>::quiet_NaN();
  double domain_hi = std::numeric_limits<double>::quiet_NaN();
  double epsilon = 1e-3;
  double support_radius = 1.0;
};

struct WindowOpts {
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
};

struct OutputOpts {
  std::string report = "speclab_report.json";
  std::string rows;
  bool dry_run = false;
};

void add_model_options(CLI::App* cmd, ModelOpts& m) {
  cmd->add_option("--model", m.model, "Operator class: dirichlet|hermite|schrodinger")
      ->default_val(m.model);
  cmd->add_option("--length", m.length, "Dirichlet interval length (number or 'pi')")
      ->default_val(m.length);
  cmd->add_option("--modes", m.modes, "Number of modes")->default_val(m.modes);
  cmd->add_option("--points", m.points, "Grid points (0 = automatic)")->default_val(m.points);
  cmd->add_option("--potential", m.potential,
                  "Potential: zero|const|harmonic|quartic|invsq|ball|gauss")
      ->default_val(m.potential);
  cmd->add_option("--c", m.coefficient, "Potential coefficient")->default_val(m.coefficient);
  cmd->add_option("--k", m.growth_k, "Growth exponent of the potential")
      ->default_val(m.growth_k);
  cmd->add_option("--domain-lo", m.domain_lo, "Left end of the discretization domain");
  cmd->add_option("--domain-hi", m.domain_hi, "Right end of the discretization domain");
  cmd->add_option("--epsilon", m.epsilon, "Left truncation for singular potentials")
      ->default_val(m.epsilon);
  cmd->add_option("--support-radius", m.support_radius,
                  "Support radius for integrable potentials")
      ->default_val(m.support_radius);
}

void add_window_options(CLI::App* cmd, WindowOpts& w) {
  cmd->add_option("--window-lo", w.lo, "Window left end (default: whole domain)");
  cmd->add_option("--window-hi", w.hi, "Window right end (default: whole domain)");
}

void add_output_options(CLI::App* cmd, OutputOpts& o, bool with_rows = true) {
  cmd->add_option("--report", o.report, "JSON report path")->default_val(o.report);
  if (with_rows) cmd->add_option("--rows", o.rows, "Optional CSV of per-trial/per-band rows");
  cmd->add_flag("--dry-run", o.dry_run, "Validate and print the resolved parameters only");
  cmd->set_config("--config", "", "Flat key=value config file; command-line flags win");
}

// ---------------------------------------------------------------------------
// Resolution of option bundles into library objects

double parse_length(const std::string& text) {
  if (text == "pi") return kPi;
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos == text.size() && v > 0.0) return v;
  } catch (const std::exception&) {
  }
  throw speclab::config_error("bad --length value '" + text + "'");
}

speclab::PotentialSpec make_potential(const ModelOpts& m) {
  speclab::PotentialSpec spec;
  spec.label = m.potential;
  spec.growth_exponent = m.growth_k;
  spec.support_radius = m.support_radius;
  const double c = m.coefficient;
  if (m.potential == "zero") {
    spec.evaluator = [](double) { return 0.0; };
  } else if (m.potential == "const") {
    spec.evaluator = [c](double) { return c; };
  } else if (m.potential == "harmonic") {
    spec.evaluator = [c](double x) { return c * x * x; };
    spec.growth_exponent = 2.0;
    spec.lower_const = 0.5 * c;
    spec.upper_const = c;
  } else if (m.potential == "quartic") {
    spec.evaluator = [c](double x) { return c * x * x * x * x; };
    spec.growth_exponent = 4.0;
    spec.lower_const = 0.5 * c;
    spec.upper_const = c;
  } else if (m.potential == "invsq") {
    spec.evaluator = [c](double x) { return c / (x * x); };
    spec.inverse_square_coeff = c;
  } else if (m.potential == "ball") {
    spec.evaluator = [c](double r) { return std::abs(r) <= 1.0 ? c : 0.0; };
    spec.support_radius = std::max(m.support_radius, 1.0);
  } else if (m.potential == "gauss") {
    spec.evaluator = [c](double r) { return c * std::exp(-r * r); };
    spec.support_radius = std::max(m.support_radius, 6.0);
  } else {
    throw speclab::config_error("unknown potential '" + m.potential + "'");
  }
  return spec;
}

std::pair<double, double> potential_domain(const ModelOpts& m) {
  double lo = m.domain_lo, hi = m.domain_hi;
  if (std::isnan(lo) || std::isnan(hi)) {
    if (m.potential == "harmonic") {
      lo = -12.0;
      hi = 12.0;
    } else if (m.potential == "quartic") {
      lo = -8.0;
      hi = 8.0;
    } else if (m.potential == "invsq") {
      lo = m.epsilon;
      hi = 1.0;
    } else if (m.potential == "gauss") {
      lo = -10.0;
      hi = 10.0;
    } else {
      lo = 0.0;
      hi = kPi;
    }
  }
  if (!(hi > lo)) throw speclab::config_error("domain must satisfy hi > lo");
  return {lo, hi};
}

speclab::ModelPtr build_model(const ModelOpts& m) {
  if (m.model == "dirichlet") {
    const std::size_t points = m.points ? m.points : std::max<std::size_t>(8 * m.modes, 1024) + 1;
    return std::make_shared<const speclab::SpectralModel>(
        speclab::build_dirichlet_1d(parse_length(m.length), m.modes, points));
  }
  if (m.model == "hermite") {
    const std::size_t points = m.points ? m.points : std::max<std::size_t>(16 * m.modes, 1024) + 1;
    return std::make_shared<const speclab::SpectralModel>(
        speclab::build_hermite_1d(m.modes, points));
  }
  if (m.model == "schrodinger") {
    auto spec = make_potential(m);
    speclab::validate_inverse_square(spec, 3);
    const auto [lo, hi] = potential_domain(m);
    const std::size_t points =
        m.points ? m.points : std::max<std::size_t>(8 * m.modes, 2048) + 2;
    return std::make_shared<const speclab::SpectralModel>(
        speclab::build_schrodinger_fd(spec, lo, hi, points, m.modes));
  }
  throw speclab::config_error("unknown model '" + m.model + "'");
}

speclab::Window resolve_window(const speclab::ModelPtr& model, const WindowOpts& w) {
  if (std::isnan(w.lo) && std::isnan(w.hi)) return speclab::full_window(model->grid);
  const double lo = std::isnan(w.lo) ? model->grid->points.front() : w.lo;
  const double hi = std::isnan(w.hi) ? model->grid->points.back() : w.hi;
  speclab::Window win = speclab::interval_window(model->grid, lo, hi);
  if (win.count() == 0) throw speclab::config_error("window selects no grid points");
  return win;
}

speclab::GridFunction resolve_function(const speclab::ModelPtr& model, const std::string& name,
                                       std::uint64_t fseed, double decay) {
  const auto& grid = model->grid;
  const double a = grid->points.front();
  const double b = grid->points.back();
  if (name == "one") return speclab::make_grid_function(grid, [](double) { return 1.0; });
  if (name == "poly")
    return speclab::make_grid_function(grid, [a, b](double x) { return (x - a) * (b - x); });
  if (name == "square") {
    const double mid = 0.5 * (a + b);
    return speclab::make_grid_function(grid, [mid](double x) {
      return x > mid ? 1.0 : (x < mid ? -1.0 : 0.0);
    });
  }
  if (name.rfind("mode:", 0) == 0) {
    const std::size_t k = std::stoull(name.substr(5));
    if (k < 1 || k > model->distinct_count())
      throw speclab::config_error("mode index out of range in --f " + name);
    return model->eigenspaces[k - 1].front();
  }
  if (name == "random") {
    auto c = speclab::random_coefficients(model, fseed, 0, decay);
    return speclab::synthesize(c);
  }
  throw speclab::config_error("unknown test function '" + name + "'");
}

// ---------------------------------------------------------------------------
// Emission

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw speclab::config_error("cannot open output file " + path);
  out << text;
}

// The report itself must be byte-stable for a fixed config and seed, so the
// timestamp goes to a sidecar file instead.
void write_report(const speclab::InequalityReport& report, const OutputOpts& out,
                  const std::vector<std::string>& args) {
  write_text_file(out.report, speclab::report_to_json(report, kToolVersion) + "\n");
  {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char stamp[64];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    std::ostringstream meta;
    meta << "timestamp=" << stamp << "\ncommand=";
    for (std::size_t i = 0; i < args.size(); ++i) meta << (i ? " " : "") << args[i];
    meta << "\n";
    write_text_file(out.report + ".meta", meta.str());
  }
  if (!out.rows.empty() && !report.table.empty()) {
    std::ostringstream csv;
    for (std::size_t i = 0; i < report.table_header.size(); ++i)
      csv << (i ? "," : "") << report.table_header[i];
    csv << "\n";
    for (const auto& row : report.table) {
      for (std::size_t i = 0; i < row.size(); ++i)
        csv << (i ? "," : "") << speclab::format_double(row[i]);
      csv << "\n";
    }
    write_text_file(out.rows, csv.str());
  }
  std::cout << report.name << ": pass=" << (report.pass ? "true" : "false")
            << " ratio=" << report.ratio << " -> " << out.report << "\n";
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

bool maybe_dry_run(const OutputOpts& out, KeyValues kv) {
  if (!out.dry_run) return false;
  kv.emplace_back("report", out.report);
  if (!out.rows.empty()) kv.emplace_back("rows", out.rows);
  std::sort(kv.begin(), kv.end());
  std::cout << "dry-run: resolved parameters\n";
  for (const auto& [k, v] : kv) std::cout << "  " << k << "=" << v << "\n";
  return true;
}

std::string fmt(double v) { return speclab::format_double(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

KeyValues model_kv(const ModelOpts& m) {
  KeyValues kv{{"model", m.model},     {"modes", fmt(m.modes)},
               {"points", fmt(m.points)}, {"length", m.length},
               {"potential", m.potential}, {"c", fmt(m.coefficient)},
               {"k", fmt(m.growth_k)},  {"epsilon", fmt(m.epsilon)}};
  if (!std::isnan(m.domain_lo)) kv.emplace_back("domain-lo", fmt(m.domain_lo));
  if (!std::isnan(m.domain_hi)) kv.emplace_back("domain-hi", fmt(m.domain_hi));
  return kv;
}

KeyValues window_kv(const WindowOpts& w) {
  KeyValues kv;
  if (!std::isnan(w.lo)) kv.emplace_back("window-lo", fmt(w.lo));
  if (!std::isnan(w.hi)) kv.emplace_back("window-hi", fmt(w.hi));
  return kv;
}

void append(KeyValues& kv, const KeyValues& more) {
  kv.insert(kv.end(), more.begin(), more.end());
}

// ---------------------------------------------------------------------------
// Subcommand wiring

struct CliState {
  std::vector<std::string> args;
  int sub_exit = 0;  // worst exit code of suite entries
};

void add_model_commands(CLI::App& app, CliState& state) {
  auto* model_cmd = app.add_subcommand("model", "Build and serialize spectral models");
  model_cmd->require_subcommand(1);

  {
    auto* build = model_cmd->add_subcommand("build", "Build a model, write its eigenvalues");
    auto m = std::make_shared<ModelOpts>();
    auto out = std::make_shared<OutputOpts>();
    auto path = std::make_shared<std::string>("model_eigenvalues.csv");
    add_model_options(build, *m);
    build->add_option("--out", *path, "Eigenvalue CSV path")->default_val(*path);
    add_output_options(build, *out, false);
    build->callback([m, out, path, &state]() {
      auto kv = model_kv(*m);
      kv.emplace_back("out", *path);
      if (maybe_dry_run(*out, kv)) return;
      auto model = build_model(*m);
      speclab::validate_model(*model);
      std::ostringstream csv;
      csv << "k,lambda,multiplicity\n";
      for (std::size_t k = 0; k < model->distinct_count(); ++k)
        csv << (k + 1) << ',' << fmt(model->eigenvalues[k]) << ','
            << model->eigenspaces[k].size() << "\n";
      write_text_file(*path, csv.str());
      std::cout << "model " << model->label << ": " << model->distinct_count()
                << " distinct eigenvalues, " << model->total_modes() << " modes, grid "
                << model->grid->size() << " -> " << *path << "\n";
      (void)state;
    });
  }
  {
    auto* exp = model_cmd->add_subcommand("export", "Export a model as a text artifact");
    auto m = std::make_shared<ModelOpts>();
    auto out = std::make_shared<OutputOpts>();
    auto path = std::make_shared<std::string>("model.txt");
    auto verify = std::make_shared<bool>(false);
    add_model_options(exp, *m);
    exp->add_option("--out", *path, "Artifact path")->default_val(*path);
    exp->add_flag("--verify-roundtrip", *verify, "Re-import and compare byte for byte");
    add_output_options(exp, *out, false);
    exp->callback([m, out, path, verify]() {
      auto kv = model_kv(*m);
      kv.emplace_back("out", *path);
      kv.emplace_back("verify-roundtrip", *verify ? "true" : "false");
      if (maybe_dry_run(*out, kv)) return;
      auto model = build_model(*m);
      speclab::validate_model(*model);
      std::ostringstream text;
      speclab::export_model(*model, text);
      write_text_file(*path, text.str());
      if (*verify) {
        std::istringstream in(text.str());
        auto back = speclab::import_model(in);
        std::ostringstream again;
        speclab::export_model(back, again);
        if (again.str() != text.str())
          throw speclab::numerical_error("model artifact did not round-trip byte-exactly");
        std::cout << "round-trip: ok\n";
      }
      std::cout << "model " << model->label << " -> " << *path << "\n";
    });
  }
}

void add_expansion_commands(CLI::App& app) {
  struct ExpandOpts {
    ModelOpts m;
    std::string f = "poly";
    std::uint64_t fseed = 1;
    double decay = 1.0;
    double R = -1.0;
    std::string out;
  };

  auto wire = [](CLI::App* cmd, std::shared_ptr<ExpandOpts> e,
                 std::shared_ptr<OutputOpts> o, const char* default_out, bool with_r,
                 const char* r_name) {
    add_model_options(cmd, e->m);
    cmd->add_option("--f", e->f, "Test function: one|poly|square|mode:<k>|random")
        ->default_val(e->f);
    cmd->add_option("--fseed", e->fseed, "Seed for --f random")->default_val(e->fseed);
    cmd->add_option("--decay", e->decay, "Coefficient decay for --f random")
        ->default_val(e->decay);
    if (with_r) cmd->add_option(r_name, e->R, "Spectral truncation level");
    e->out = default_out;
    cmd->add_option("--out", e->out, "Output CSV path")->default_val(e->out);
    add_output_options(cmd, *o, false);
  };

  {
    auto* cmd = app.add_subcommand("expand", "Expand a function in the model eigenbasis");
    auto e = std::make_shared<ExpandOpts>();
    auto o = std::make_shared<OutputOpts>();
    wire(cmd, e, o, "coefficients.csv", false, "");
    cmd->callback([e, o]() {
      auto kv = model_kv(e->m);
      append(kv, {{"f", e->f}, {"fseed", fmt(std::size_t(e->fseed))}, {"out", e->out}});
      if (maybe_dry_run(*o, kv)) return;
      auto model = build_model(e->m);
      auto c = speclab::analyze(model, resolve_function(model, e->f, e->fseed, e->decay));
      std::ostringstream csv;
      speclab::export_coefficients_csv(c, csv);
      write_text_file(e->out, csv.str());
      std::cout << "expanded " << e->f << " -> " << e->out << "\n";
    });
  }
  {
    auto* cmd = app.add_subcommand("partial-sum", "Truncated expansion at level R");
    auto e = std::make_shared<ExpandOpts>();
    auto o = std::make_shared<OutputOpts>();
    wire(cmd, e, o, "partial_sum.csv", true, "--R");
    cmd->callback([e, o]() {
      auto kv = model_kv(e->m);
      append(kv, {{"f", e->f}, {"R", fmt(e->R)}, {"out", e->out}});
      if (maybe_dry_run(*o, kv)) return;
      auto model = build_model(e->m);
      const double R = e->R < 0.0 ? model->max_eigenvalue() : e->R;
      auto c = speclab::analyze(model, resolve_function(model, e->f, e->fseed, e->decay));
      auto s = speclab::partial_sum(c, R);
      std::ostringstream csv;
      speclab::export_function_csv(s, csv);
      write_text_file(e->out, csv.str());
      std::cout << "partial sum at R=" << R << " -> " << e->out << "\n";
    });
  }
  {
    auto* cmd = app.add_subcommand("maximal", "Pointwise maximal function of partial sums");
    auto e = std::make_shared<ExpandOpts>();
    auto o = std::make_shared<OutputOpts>();
    wire(cmd, e, o, "maximal.csv", true, "--rmax");
    cmd->callback([e, o]() {
      auto kv = model_kv(e->m);
      append(kv, {{"f", e->f}, {"rmax", fmt(e->R)}, {"out", e->out}});
      if (maybe_dry_run(*o, kv)) return;
      auto model = build_model(e->m);
      const double R = e->R < 0.0 ? model->max_eigenvalue() : e->R;
      auto c = speclab::analyze(model, resolve_function(model, e->f, e->fseed, e->decay));
      auto s = speclab::maximal_function(c, R);
      std::ostringstream csv;
      speclab::export_function_csv(s, csv);
      write_text_file(e->out, csv.str());
      std::cout << "maximal function up to R=" << R << " -> " << e->out << "\n";
    });
  }
}

std::vector<double> parse_m_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(speclab::parse_double(item));
  }
  if (out.empty()) throw speclab::config_error("empty --mlist");
  return out;
}

void add_check_commands(CLI::App& app, CliState& state) {
  auto* check = app.add_subcommand("check", "Run one inequality check");
  check->require_subcommand(1);

  {
    auto* cmd = check->add_subcommand("rm", "Orthogonal-series maximal function bound");
    auto o = std::make_shared<OutputOpts>();
    auto nf = std::make_shared<std::size_t>(64);
    auto dim = std::make_shared<std::size_t>(256);
    auto trials = std::make_shared<std::size_t>(200);
    auto seed = std::make_shared<std::uint64_t>(1);
    cmd->add_option("--nfuncs", *nf)->default_val(*nf);
    cmd->add_option("--dim", *dim)->default_val(*dim);
    cmd->add_option("--trials", *trials)->default_val(*trials);
    cmd->add_option("--seed", *seed)->default_val(*seed);
    add_output_options(cmd, *o);
    cmd->callback([=, &state]() {
      KeyValues kv{{"nfuncs", fmt(*nf)}, {"dim", fmt(*dim)}, {"trials", fmt(*trials)},
                   {"seed", fmt(std::size_t(*seed))}};
      if (maybe_dry_run(*o, kv)) return;
      write_report(speclab::rm_check(*nf, *dim, *trials, *seed), *o, state.args);
    });
  }
  {
    auto* cmd = check->add_subcommand("blocking", "Blocking constant of the spectral grid");
    auto o = std::make_shared<OutputOpts>();
    auto a = std::make_shared<double>(1.0);
    auto kmax = std::make_shared<std::size_t>(1000000);
    cmd->add_option("--a", *a)->default_val(*a);
    cmd->add_option("--kmax", *kmax)->default_val(*kmax);
    add_output_options(cmd, *o);
    cmd->callback([=, &state]() {
      KeyValues kv{{"a", fmt(*a)}, {"kmax", fmt(*kmax)}};
      if (maybe_dry_run(*o, kv)) return;
      write_report(speclab::blocking_constant_check(*a, *kmax), *o, state.args);
    });
  }
  {
    auto* cmd = check->add_subcommand("maximal-ineq", "Windowed maximal inequality constant");
    auto o = std::make_shared<OutputOpts>();
    auto m = std::make_shared<ModelOpts>();
    auto w = std::make_shared<WindowOpts>();
    auto trials = std::make_shared<std::size_t>(100);
    auto seed = std::make_shared<std::uint64_t>(11);
    auto decay = std::make_shared<double>(1.0);
    add_model_options(cmd, *m);
    add_window_options(cmd, *w);
    cmd->add_option("--trials", *trials)->default_val(*trials);
    cmd->add_option("--seed", *seed)->default_val(*seed);
    cmd->add_option("--decay", *decay)->default_val(*decay);
    add_output_options(cmd, *o);
    cmd->callback([=, &state]() {
      auto kv = model_kv(*m);
      append(kv, window_kv(*w));
      append(kv, {{"trials", fmt(*trials)}, {"seed", fmt(std::size_t(*seed))},
                  {"decay", fmt(*decay)}});
      if (maybe_dry_run(*o, kv)) return;
      auto model = build_model(*m);
      auto win = resolve_window(model, *w);
      write_report(speclab::maximal_inequality_check(model, win, *trials, *seed, *decay), *o,
                   state.args);
    });
  }
  {
    auto* cmd = check->add_subcommand("intrablock", "Intra-block maximal sums");
    auto o = std::make_shared<OutputOpts>();
    auto m = std::make_shared<ModelOpts>();
    auto w = std::make_shared<WindowOpts>();
    auto a = std::make_shared<double>(1.0);
    auto kmax = std::make_shared<std::size_t>(0);
    auto trials = std::make_shared<std::size_t>(50);
    auto seed = std::make_shared<std::uint64_t>(3);
    add_model_options(cmd, *m);
    add_window_options(cmd, *w);
    cmd->add_option("--blocking-a", *a)->default_val(*a);
    cmd->add_option("--blocking-kmax", *kmax, "0 = smallest grid covering the spectrum")
        ->default_val(*kmax);
    cmd->add_option("--trials", *trials)->default_val(*trials);
    cmd->add_option("--seed", *seed)->default_val(*seed);
    add_output_options(cmd, *o);
    cmd->callback([=, &state]() {
      auto kv = model_kv(*m);
      append(kv, window_kv(*w));
      append(kv, {{"blocking-a", fmt(*a)}, {"blocking-kmax", fmt(*kmax)},
                  {"trials", fmt(*trials)}, {"seed", fmt(std::size_t(*seed))}});
      if (maybe_dry_run(*o, kv)) return;
      auto model = build_model(*m);
      auto win = resolve_window(model, *w);
      std::size_t cover = *kmax;
      if (cover == 0) {
        const double need = std::pow(model->max_eigenvalue(), 2.0 * *a);
        cover = static_cast<std::size_t>(std::ceil(need)) + 1;
      }
      auto blocking = speclab::make_dyadic_blocking(*a, cover);
      write_report(speclab::intrablock_maximal_check(model, blocking, win, *trials, *seed),
                   *o, state.args);
    });
  }
  {
    auto* cmd = check->add_subcommand("plancherel", "Windowed band-filter norm growth");
    auto o = std::make_shared<OutputOpts>();
    auto m = std::make_shared<ModelOpts>();
    auto w = std::make_shared<WindowOpts>();
    auto mlist = std::make_shared<std::string>("4,8,16,32,64,128,256,512");
    auto root = std::make_shared<int>(1);
    auto ball = std::make_shared<bool>(false);
    add_model_options(cmd, *m);
    add_window_options(cmd, *w);
    cmd->add_option("--mlist", *mlist, "Comma-separated list of M values")->default_val(*mlist);
    cmd->add_option("--root-order", *root, "Root order m of the functional calculus")
        ->default_val(*root);
    cmd->add_flag("--ball", *ball, "Shrinking-ball windows of radius 1/M");
    add_output_options(cmd, *o);
    cmd->callback([=, &state]() {
      auto kv = model_kv(*m);
      append(kv, window_kv(*w));
      append(kv, {{"mlist", *mlist}, {"root-order", fmt(std::size_t(*root))},
                  {"ball", *ball ? "true" : "false"}});
      if (maybe_dry_run(*o, kv)) return;
      auto model = build_model(*m);
      auto win = resolve_window(model, *w);
      const auto mode = *ball ? speclab::PlancherelMode::shrinking_ball
                              : speclab::PlancherelMode::fixed_window;
      write_report(
          speclab::plancherel_check(model, win, parse_m_list(*mlist), *root, mode), *o,
          state.args);
    });
  }
  {
    auto* cmd = check->add_subcommand("eigencount", "Distinct-eigenvalue count condition");
    auto o = std::make_shared<OutputOpts>();
    auto m = std::make_shared<ModelOpts>();
    add_model_options(cmd, *m);
    add_output_options(cmd, *o);
    cmd->callback([=, &state]() {
      if (maybe_dry_run(*o, model_kv(*m))) return;
      write_report(speclab::eigencount_condition_check(build_model(*m)), *o, state.args);
    });
  }
  {
    auto* cmd = check->add_subcommand("weyl", "Multiplicity-count growth fit");
    auto o = std::make_shared<OutputOpts>();
    auto m = std::make_shared<ModelOpts>();
    auto lambda = std::make_shared<double>(-1.0);
    add_model_options(cmd, *m);
    cmd->add_option("--lambda", *lambda, "Also report N(lambda) at this level");
    add_output_options(cmd, *o);
    cmd->callback([=, &state]() {
      auto kv = model_kv(*m);
      if (*lambda >= 0.0) kv.emplace_back("lambda", fmt(*lambda));
      if (maybe_dry_run(*o, kv)) return;
      auto model = build_model(*m);
      std::vector<double> lx, ly;
      std::size_t cumulative = 0;
      for (std::size_t k = 0; k < model->distinct_count(); ++k) {
        cumulative += model->eigenspaces[k].size();
        if (model->eigenvalues[k] > 0.0) {
          lx.push_back(std::log(model->eigenvalues[k]));
          ly.push_back(std::log(static_cast<double>(cumulative)));
        }
      }
      const auto fit = speclab::fit_line(lx, ly);
      speclab::InequalityReport report;
      report.name = "weyl";
      report.lhs = static_cast<double>(model->total_modes());
      report.rhs = std::exp(fit.intercept) *
                   std::pow(model->max_eigenvalue(), fit.slope);
      report.ratio = report.rhs > 0.0 ? report.lhs / report.rhs : 0.0;
      report.fitted_exponent = fit.slope;
      report.fitted_constant = std::exp(fit.intercept);
      report.pass = fit.r_squared >= 0.9;
      report.sizes["modes"] = static_cast<double>(model->total_modes());
      report.metadata["r_squared"] = fit.r_squared;
      if (*lambda >= 0.0)
        report.metadata["count_at_lambda"] =
            static_cast<double>(speclab::weyl_count(*model, *lambda));
      write_report(report, *o, state.args);
    });
  }
  {
    auto* cmd = check->add_subcommand("phasespace", "Phase-space volume estimate");
    auto o = std::make_shared<OutputOpts>();
    auto m = std::make_shared<ModelOpts>();
    auto lambda = std::make_shared<double>(4.0);
    auto dim = std::make_shared<int>(1);
    auto samples = std::make_shared<std::size_t>(1000000);
    auto seed = std::make_shared<std::uint64_t>(5);
    add_model_options(cmd, *m);
    cmd->add_option("--lambda", *lambda)->default_val(*lambda);
    cmd->add_option("--n", *dim, "Spatial dimension (1..3)")->default_val(*dim);
    cmd->add_option("--samples", *samples)->default_val(*samples);
    cmd->add_option("--seed", *seed)->default_val(*seed);
    add_output_options(cmd, *o);
    cmd->callback([=, &state]() {
      auto kv = model_kv(*m);
      append(kv, {{"lambda", fmt(*lambda)}, {"n", fmt(std::size_t(*dim))},
                  {"samples", fmt(*samples)}, {"seed", fmt(std::size_t(*seed))}});
      if (maybe_dry_run(*o, kv)) return;
      auto spec = make_potential(*m);
      if (!(spec.lower_const > 0.0)) spec.lower_const = 0.5 * m->coefficient;
      if (!(spec.growth_exponent > 0.0)) spec.growth_exponent = m->growth_k;
      const auto est = speclab::phase_space_volume(spec, *lambda, *dim, *samples, *seed);
      speclab::InequalityReport report;
      report.name = "phasespace";
      report.lhs = est.value;
      report.rhs = est.std_error;
      report.ratio = est.std_error > 0.0 ? est.value / est.std_error : 0.0;
      report.pass = est.std_error >= 0.0;
      report.seed = *seed;
      report.sizes["samples"] = static_cast<double>(est.samples);
      report.metadata["volume"] = est.value;
      report.metadata["std_error"] = est.std_error;
      report.metadata["lambda"] = *lambda;
      report.metadata["dimension"] = *dim;
      write_report(report, *o, state.args);
    });
  }
  {
    auto* cmd = check->add_subcommand("hardy", "Radial Hardy quotient lower bound");
    auto o = std::make_shared<OutputOpts>();
    auto n = std::make_shared<int>(3);
    auto trials = std::make_shared<std::size_t>(100);
    auto seed = std::make_shared<std::uint64_t>(7);
    cmd->add_option("--n", *n, "Dimension (>= 3)")->default_val(*n);
    cmd->add_option("--trials", *trials)->default_val(*trials);
    cmd->add_option("--seed", *seed)->default_val(*seed);
    add_output_options(cmd, *o);
    cmd->callback([=, &state]() {
      KeyValues kv{{"n", fmt(std::size_t(*n))}, {"trials", fmt(*trials)},
                   {"seed", fmt(std::size_t(*seed))}};
      if (maybe_dry_run(*o, kv)) return;
      write_report(speclab::hardy_check(*n, *trials, *seed), *o, state.args);
    });
  }
  {
    auto* cmd = check->add_subcommand("scattering", "Three-dimensional scattering conditions");
    auto o = std::make_shared<OutputOpts>();
    auto m = std::make_shared<ModelOpts>();
    auto samples = std::make_shared<std::size_t>(1000000);
    auto seed = std::make_shared<std::uint64_t>(9);
    m->potential = "ball";
    add_model_options(cmd, *m);
    cmd->add_option("--samples", *samples)->default_val(*samples);
    cmd->add_option("--seed", *seed)->default_val(*seed);
    add_output_options(cmd, *o);
    cmd->callback([=, &state]() {
      auto kv = model_kv(*m);
      append(kv, {{"samples", fmt(*samples)}, {"seed", fmt(std::size_t(*seed))}});
      if (maybe_dry_run(*o, kv)) return;
      write_report(speclab::scattering_condition_check(make_potential(*m), *samples, *seed),
                   *o, state.args);
    });
  }
  {
    auto* cmd = check->add_subcommand("growth", "Potential growth-condition validation");
    auto o = std::make_shared<OutputOpts>();
    auto m = std::make_shared<ModelOpts>();
    auto samples = std::make_shared<std::size_t>(400);
    add_model_options(cmd, *m);
    cmd->add_option("--samples", *samples)->default_val(*samples);
    add_output_options(cmd, *o);
    cmd->callback([=, &state]() {
      auto kv = model_kv(*m);
      kv.emplace_back("samples", fmt(*samples));
      if (maybe_dry_run(*o, kv)) return;
      auto spec = make_potential(*m);
      spec.growth_exponent = m->growth_k;
      const auto [lo, hi] = potential_domain(*m);
      write_report(speclab::validate_growth_conditions(spec, lo, hi, *samples), *o,
                   state.args);
    });
  }
}

void add_suite_command(CLI::App& app, CliState& state) {
  auto* cmd = app.add_subcommand("suite", "Run every entry of a manifest file");
  auto manifest = std::make_shared<std::string>();
  auto jobs = std::make_shared<std::size_t>(1);
  cmd->add_option("--manifest", *manifest, "File with one speclab invocation per line")
      ->required();
  cmd->add_option("--jobs", *jobs, "Parallel manifest entries")->default_val(*jobs);
  cmd->callback([manifest, jobs, &state]() {
    std::ifstream in(*manifest);
    if (!in) throw speclab::config_error("cannot open manifest " + *manifest);
    std::vector<std::vector<std::string>> entries;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::vector<std::string> args;
      std::string tok;
      while (ls >> tok) args.push_back(tok);
      if (!args.empty()) entries.push_back(std::move(args));
    }

    std::vector<int> codes(entries.size(), 0);
    const std::size_t n_jobs = std::max<std::size_t>(1, *jobs);
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= entries.size()) break;
        codes[i] = run_cli(entries[i]);
      }
    };
    for (std::size_t t = 0; t < n_jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    int worst = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (codes[i] != 0)
        std::cerr << "suite entry " << (i + 1) << " exited with code " << codes[i] << "\n";
      worst = std::max(worst, codes[i]);
    }
    state.sub_exit = worst;
    std::cout << "suite: " << entries.size() << " entries, worst exit " << worst << "\n";
  });
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"speclab: finite spectral models and empirical inequality checks"};
  app.require_subcommand(1);

  CliState state;
  state.args = args;
  add_model_commands(app, state);
  add_expansion_commands(app);
  add_check_commands(app, state);
  add_suite_command(app, state);

  std::vector<const char*> argv;
  argv.push_back("speclab");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const speclab::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const speclab::config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const speclab::structural_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const speclab::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return state.sub_exit;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args);
}
