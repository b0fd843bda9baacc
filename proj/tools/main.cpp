// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdelawson/csv.hpp"
#include "sdelawson/experiments.hpp"
#include "sdelawson/problems.hpp"
#include "sdelawson/stability.hpp"

namespace {

using namespace sdelawson;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitDivergence = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "2^-6..2^-10", "2^-8", "0.125", comma separated; ranges expand to all
// powers of two between the endpoints.
std::vector<double> parse_h_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  const auto parse_pow = [](const std::string& s) -> std::optional<int> {
    if (s.rfind("2^", 0) != 0) return std::nullopt;
    try {
      return std::stoi(s.substr(2));
    } catch (const std::exception&) {
      throw UsageError("bad step-size token: " + s);
    }
  };
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    const auto range_pos = token.find("..");
    if (range_pos != std::string::npos) {
      const auto lo = parse_pow(token.substr(0, range_pos));
      const auto hi = parse_pow(token.substr(range_pos + 2));
      if (!lo || !hi) throw UsageError("ranges use the form 2^-a..2^-b: " + token);
      const int from = std::max(*lo, *hi);
      const int to = std::min(*lo, *hi);
      for (int k = from; k >= to; --k) {
        out.push_back(std::pow(2.0, k));
      }
      continue;
    }
    if (const auto p = parse_pow(token)) {
      out.push_back(std::pow(2.0, *p));
      continue;
    }
    try {
      out.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw UsageError("bad step-size token: " + token);
    }
  }
  if (out.empty()) throw UsageError("empty step-size list");
  return out;
}

// Numbers with an optional "pi" suffix: "pi", "10pi", "0.5pi", "3.14".
double parse_pi_value(const std::string& text) {
  if (text == "pi") return M_PI;
  if (text.size() > 2 && text.substr(text.size() - 2) == "pi") {
    try {
      return std::stod(text.substr(0, text.size() - 2)) * M_PI;
    } catch (const std::exception&) {
      throw UsageError("bad value: " + text);
    }
  }
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw UsageError("bad value: " + text);
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += (i ? "," : "") + items[i];
  }
  return out;
}

struct OutputTarget {
  std::ofstream file;
  std::ostream* stream = &std::cout;
  bool to_file = false;

  explicit OutputTarget(const std::string& path) {
    if (!path.empty() && path != "-") {
      file.open(path);
      if (!file) throw UsageError("cannot open output file: " + path);
      stream = &file;
      to_file = true;
    }
  }
  // Human-readable summaries go to stdout when the CSV goes to a file, and
  // to stderr when the CSV occupies stdout.
  std::ostream& summary() { return to_file ? std::cout : std::cerr; }
};

// ---------------------------------------------------------------------------
// convergence
// ---------------------------------------------------------------------------

struct ConvergenceOptions {
  std::string problem = "oscillator";
  double lambda = 1.0;
  double mu = 0.5;
  std::optional<double> drift_split;
  std::string schemes = "em-dsl,platen-dsl";
  std::string h_list = "2^-6..2^-10";
  int batches = 8;
  int paths = 50;
  std::string reference_scheme = "platen15-dsl";
  int reference_refinement = 64;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string output;
  bool timings = false;
  double t0 = 0.0;
  double T = 1.0;
};

SemiLinearSde convergence_problem(const ConvergenceOptions& opt, Vector& x0) {
  if (opt.problem == "oscillator") {
    x0 = (Vector(2) << 1.0, 0.0).finished();
    return problems::nonlinear_oscillator(opt.lambda);
  }
  if (opt.problem == "gbm") {
    x0 = Vector::Constant(1, 1.0);
    const double split = opt.drift_split.value_or(opt.lambda);
    const double sigma = opt.lambda - split; // total drift = split + sigma
    return problems::scalar_linear(split, sigma, opt.mu);
  }
  throw UsageError("unknown convergence problem: " + opt.problem +
                   " (available: oscillator, gbm)");
}

std::string config_comment(const std::string& command, const ConvergenceOptions& opt) {
  std::ostringstream c;
  c << "sdelawson convergence " << command << " problem=" << opt.problem
    << " lambda=" << csv::format_double(opt.lambda);
  if (opt.problem == "gbm") {
    c << " mu=" << csv::format_double(opt.mu)
      << " drift-split=" << csv::format_double(opt.drift_split.value_or(opt.lambda));
  }
  c << " schemes=" << opt.schemes << " h=" << opt.h_list << " batches=" << opt.batches
    << " paths=" << opt.paths << " reference=" << opt.reference_scheme
    << " ref-refinement=" << opt.reference_refinement << " t0=" << csv::format_double(opt.t0)
    << " T=" << csv::format_double(opt.T) << " seed=" << opt.seed;
  return c.str();
}

int write_error_tables(const ConvergenceOptions& opt, const std::string& command,
                       const experiments::ExperimentResult& result) {
  OutputTarget target(opt.output);
  csv::Writer writer(*target.stream, config_comment(command, opt));

  std::vector<std::string> columns = {"h"};
  for (const auto& table : result.tables) {
    columns.push_back("err_" + table.scheme);
    columns.push_back("ci_" + table.scheme);
    if (opt.timings) columns.push_back("time_" + table.scheme);
  }
  writer.header(columns);
  const std::size_t levels = result.tables.front().h.size();
  for (std::size_t l = 0; l < levels; ++l) {
    std::vector<std::optional<double>> row;
    row.push_back(result.tables.front().h[l]);
    for (const auto& table : result.tables) {
      row.push_back(table.error[l]);
      row.push_back(table.ci_halfwidth[l]);
      if (opt.timings) row.push_back(table.wall_seconds[l]);
    }
    writer.row(row);
  }

  auto& summary = target.summary();
  for (const auto& table : result.tables) {
    summary << table.scheme << ": measured order " << csv::format_double(table.slope);
    if (!table.error.empty()) {
      summary << "  (error at h=" << csv::format_double(table.h.back()) << ": "
              << csv::format_double(table.error.back()) << " +- "
              << csv::format_double(table.ci_halfwidth.back()) << ")";
    }
    summary << "\n";
  }
  if (result.divergent_paths > 0) {
    summary << "divergent runs: " << result.divergent_paths << " of " << result.total_runs
            << "\n";
  }
  return result.divergence_threshold_exceeded ? kExitDivergence : 0;
}

int run_convergence_strong(const ConvergenceOptions& opt) {
  Vector x0;
  const SemiLinearSde problem = convergence_problem(opt, x0);
  experiments::ExperimentConfig config;
  config.schemes = split_list(opt.schemes);
  config.h_values = parse_h_list(opt.h_list);
  config.batches = opt.batches;
  config.paths_per_batch = opt.paths;
  config.reference_scheme = opt.reference_scheme;
  config.reference_refinement = opt.reference_refinement;
  config.seed = opt.seed;
  config.workers = opt.workers;
  const auto result = experiments::strong_error(problem, opt.t0, opt.T, x0, config);
  return write_error_tables(opt, "strong", result);
}

int run_convergence_weak(const ConvergenceOptions& opt) {
  Vector x0;
  const SemiLinearSde problem = convergence_problem(opt, x0);
  experiments::ExperimentConfig config;
  config.schemes = split_list(opt.schemes);
  config.h_values = parse_h_list(opt.h_list);
  config.batches = opt.batches;
  config.paths_per_batch = opt.paths;
  config.reference_scheme = opt.reference_scheme;
  config.reference_refinement = opt.reference_refinement;
  config.seed = opt.seed;
  config.workers = opt.workers;

  experiments::WeakObservable obs;
  if (opt.problem == "gbm") {
    const double lambda = opt.lambda;
    const double mu = opt.mu;
    obs.f = [](const Vector& x) { return x[0] * x[0]; };
    obs.exact_path_value = [lambda, mu](const Vector& start, double t0, double T,
                                        const Vector& w) {
      const double xt = start[0] * std::exp((lambda - 0.5 * mu * mu) * (T - t0) + mu * w[0]);
      return xt * xt;
    };
  } else {
    obs.f = [](const Vector& x) { return x[0] * x[0]; };
    obs.use_simulated_reference = true;
  }
  const auto result = experiments::weak_error(problem, opt.t0, opt.T, x0, config, obs);
  return write_error_tables(opt, "weak", result);
}

// ---------------------------------------------------------------------------
// stability
// ---------------------------------------------------------------------------

struct StabilityOptions {
  std::string problem = "orthogonal";
  double bh = 1.0;
  std::string omega2h = "pi";
  double lambda_h = -2.0;
  double sigma2_h = 2.5;
  double lambda_min = -3.0;
  double lambda_max = 0.0;
  int columns = 600;
  double sigma2_max = 8.0;
  std::string implicit_variant = "printed";
  int workers = 1;
  std::string output;
};

stability::RegionProblem region_problem(const StabilityOptions& opt) {
  stability::RegionProblem p;
  if (opt.problem == "orthogonal") {
    p.kind = stability::RegionProblem::Kind::OrthogonalNoise;
    p.bh = opt.bh;
  } else if (opt.problem == "oscillator") {
    p.kind = stability::RegionProblem::Kind::Oscillator;
    p.omega2h = parse_pi_value(opt.omega2h);
  } else {
    throw UsageError("unknown stability problem: " + opt.problem +
                     " (available: orthogonal, oscillator)");
  }
  return p;
}

stability::BoundaryKind implicit_kind(const StabilityOptions& opt) {
  if (opt.implicit_variant == "printed") return stability::BoundaryKind::ImplicitPlatenPrinted;
  if (opt.implicit_variant == "derived") return stability::BoundaryKind::ImplicitPlatenDerived;
  throw UsageError("unknown implicit variant: " + opt.implicit_variant +
                   " (available: printed, derived)");
}

std::string stability_comment(const StabilityOptions& opt, const std::string& sub) {
  std::ostringstream c;
  c << "sdelawson stability " << sub << " problem=" << opt.problem;
  if (opt.problem == "orthogonal") {
    c << " b-h=" << csv::format_double(opt.bh);
  } else {
    c << " omega2-h=" << csv::format_double(parse_pi_value(opt.omega2h));
  }
  c << " implicit-variant=" << opt.implicit_variant;
  return c.str();
}

int run_stability_region(const StabilityOptions& opt) {
  if (opt.columns < 1) throw UsageError("region scan needs at least one column");
  const auto problem = region_problem(opt);
  stability::RegionScanSpec spec;
  spec.lambda_min = opt.lambda_min;
  spec.lambda_max = opt.lambda_max;
  spec.columns = opt.columns;
  spec.sigma2_max = opt.sigma2_max;

  const auto impl = implicit_kind(opt);
  const std::vector<std::pair<std::string, stability::BoundaryKind>> kinds = {
      {"em_dsl", stability::BoundaryKind::EmDsl},
      {"platen_dsl", stability::BoundaryKind::PlatenDsl},
      {"implicit_platen", impl},
      {"exact", stability::BoundaryKind::Exact},
  };

  OutputTarget target(opt.output);
  std::ostringstream comment;
  comment << stability_comment(opt, "region") << " lambda-min="
          << csv::format_double(opt.lambda_min) << " lambda-max="
          << csv::format_double(opt.lambda_max) << " columns=" << opt.columns
          << " sigma2-max=" << csv::format_double(opt.sigma2_max);
  csv::Writer writer(*target.stream, comment.str());

  std::vector<std::vector<stability::RegionColumn>> curves;
  std::vector<std::string> columns = {"lambda_h"};
  for (const auto& [name, kind] : kinds) {
    curves.push_back(stability::region_scan(problem, kind, spec, opt.workers));
    columns.push_back("sigma2_h_" + name);
  }
  writer.header(columns);

  long failures = 0;
  for (int col = 0; col < opt.columns; ++col) {
    std::vector<std::optional<double>> row;
    row.push_back(curves.front()[static_cast<std::size_t>(col)].lambda_h);
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      const auto& column = curves[k][static_cast<std::size_t>(col)];
      switch (column.status) {
        case stability::ColumnStatus::Boundary:
          row.push_back(column.sigma2_h);
          break;
        case stability::ColumnStatus::BracketFailure:
          row.push_back(column.sigma2_h); // first crossing, flagged below
          ++failures;
          target.summary() << "warning: non-monotone stability slice for " << kinds[k].first
                           << " at lambda_h=" << csv::format_double(column.lambda_h) << "\n";
          break;
        case stability::ColumnStatus::UnstableAtZero:
          row.push_back(0.0);
          break;
        case stability::ColumnStatus::Unbounded:
          row.push_back(std::nullopt);
          break;
      }
    }
    writer.row(row);
  }
  if (failures > 0) {
    target.summary() << failures << " column(s) had bracket failures; partial data emitted\n";
  }
  return 0;
}

int run_stability_point(const StabilityOptions& opt) {
  const auto problem = region_problem(opt);
  OutputTarget target(opt.output);
  std::ostringstream comment;
  comment << stability_comment(opt, "point") << " lambda-h=" << csv::format_double(opt.lambda_h)
          << " sigma2-h=" << csv::format_double(opt.sigma2_h);
  csv::Writer writer(*target.stream, comment.str());
  writer.header({"kind", "rho", "stable"});

  const std::vector<std::pair<std::string, stability::BoundaryKind>> kinds = {
      {"em-dsl", stability::BoundaryKind::EmDsl},
      {"platen-dsl", stability::BoundaryKind::PlatenDsl},
      {"implicit-platen-printed", stability::BoundaryKind::ImplicitPlatenPrinted},
      {"implicit-platen-derived", stability::BoundaryKind::ImplicitPlatenDerived},
      {"exact", stability::BoundaryKind::Exact},
  };
  for (const auto& [name, kind] : kinds) {
    const double rho = stability::point_rho(problem, kind, opt.lambda_h, opt.sigma2_h);
    writer.raw_row({name, csv::format_double(rho), rho < 1.0 ? "1" : "0"});
    target.summary() << name << ": rho = " << csv::format_double(rho) << " ("
                     << (rho < 1.0 ? "stable" : "unstable") << ")\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string problem = "oscillator";
  double bh = 1.0;
  std::string omega2h = "pi";
  double lambda_h = -0.3;
  double sigma2_h = 0.4;
  double h = 0.1;
  int steps = 20;
  int paths = 10000;
  std::string schemes = "em-dsl,platen-dsl,implicit-platen";
  std::string x0 = "1,1";
  std::uint64_t seed = 0;
  int workers = 1;
  std::string output;
};

int run_simulate(const SimulateOptions& opt) {
  if (opt.paths < 1) throw UsageError("simulate needs at least one path");
  if (opt.steps < 1) throw UsageError("simulate needs at least one step");
  if (!(opt.h > 0.0)) throw UsageError("simulate needs a positive step size");

  const double lambda = opt.lambda_h / opt.h;
  const double sigma = std::sqrt(opt.sigma2_h / opt.h);
  SemiLinearSde problem = [&]() {
    if (opt.problem == "orthogonal") {
      return problems::orthogonal_noise(lambda, opt.bh / opt.h, sigma);
    }
    if (opt.problem == "oscillator") {
      return problems::damped_oscillator(lambda, parse_pi_value(opt.omega2h) / opt.h, sigma);
    }
    throw UsageError("unknown simulate problem: " + opt.problem +
                     " (available: orthogonal, oscillator)");
  }();

  const auto x0_parts = split_list(opt.x0);
  if (x0_parts.size() != 2) throw UsageError("--x0 needs two comma-separated components");
  Vector x0(2);
  x0 << std::stod(x0_parts[0]), std::stod(x0_parts[1]);

  const auto scheme_ids = split_list(opt.schemes);
  if (scheme_ids.empty()) throw UsageError("simulate needs at least one scheme");

  std::vector<experiments::MomentSeries> series;
  for (const auto& id : scheme_ids) {
    series.push_back(experiments::moment_evolution(problem, id, 0.0, x0, opt.h, opt.steps,
                                                   opt.paths, opt.seed, opt.workers));
  }

  // Exact second moments via the stability matrix of the problem; the full
  // noise matrix is sigma J for both test systems.
  Matrix rot(2, 2);
  rot << 0.0, 1.0, -1.0, 0.0;
  const Matrix s_sde = stability::sde_stability_matrix(problem.A[0], {Matrix(sigma * rot)});
  const Matrix p0 = x0 * x0.transpose();

  OutputTarget target(opt.output);
  std::ostringstream comment;
  comment << "sdelawson simulate problem=" << opt.problem
          << " lambda-h=" << csv::format_double(opt.lambda_h)
          << " sigma2-h=" << csv::format_double(opt.sigma2_h);
  if (opt.problem == "orthogonal") {
    comment << " b-h=" << csv::format_double(opt.bh);
  } else {
    comment << " omega2-h=" << csv::format_double(parse_pi_value(opt.omega2h));
  }
  comment << " h=" << csv::format_double(opt.h) << " steps=" << opt.steps
          << " paths=" << opt.paths << " schemes=" << join(scheme_ids) << " seed=" << opt.seed;
  csv::Writer writer(*target.stream, comment.str());

  std::vector<std::string> columns = {"t"};
  for (const auto& id : scheme_ids) {
    columns.push_back("mc_" + id + "_1");
    columns.push_back("mc_" + id + "_2");
  }
  columns.push_back("exact_1");
  columns.push_back("exact_2");
  writer.header(columns);

  for (int n = 0; n <= opt.steps; ++n) {
    std::vector<std::optional<double>> row;
    row.push_back(n * opt.h);
    for (const auto& s : series) {
      if (n < static_cast<int>(s.times.size())) {
        row.push_back(s.second_moment(n, 0));
        row.push_back(s.second_moment(n, 1));
      } else {
        row.push_back(std::nullopt);
        row.push_back(std::nullopt);
      }
    }
    const Matrix pt = stability::exact_second_moment(s_sde, p0, n * opt.h);
    row.push_back(pt(0, 0));
    row.push_back(pt(1, 1));
    writer.row(row);
  }

  for (const auto& s : series) {
    if (s.truncated) {
      target.summary() << "warning: " << s.scheme << " diverged (" << s.divergent_paths
                       << " paths); series truncated at t="
                       << csv::format_double(s.times.empty() ? 0.0 : s.times.back()) << "\n";
    }
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential (Lawson-type) stochastic Runge-Kutta schemes: convergence "
               "measurement and mean-square stability analysis"};
  app.set_config("--config", "", "Read options from an INI/TOML file (flags take precedence)");
  app.fallthrough();
  app.require_subcommand(1);

  // convergence
  auto* convergence = app.add_subcommand("convergence", "Measure strong or weak convergence orders");
  convergence->fallthrough();
  convergence->require_subcommand(1);
  ConvergenceOptions copt;
  const auto add_convergence_flags = [&](CLI::App* cmd) {
    // --h is a spec'd option name; keep only the long help flag here.
    cmd->set_help_flag("--help", "Print this help message and exit");
    cmd->add_option("--problem", copt.problem, "Test problem: oscillator | gbm");
    cmd->add_option("--lambda", copt.lambda, "Problem drift parameter");
    cmd->add_option("--mu", copt.mu, "GBM noise intensity");
    cmd->add_option("--drift-split", copt.drift_split,
                    "GBM: drift part handled by the exponential (default: all of it)");
    cmd->add_option("--schemes", copt.schemes, "Comma-separated scheme ids");
    cmd->add_option("--h", copt.h_list, "Step sizes, e.g. 2^-6..2^-10 or 0.25,0.125");
    cmd->add_option("--batches", copt.batches, "Batch count");
    cmd->add_option("--paths", copt.paths, "Paths per batch");
    cmd->add_option("--reference-scheme", copt.reference_scheme, "Reference scheme id");
    cmd->add_option("--ref-refinement", copt.reference_refinement,
                    "Reference step refinement: h_ref = h_min / this");
    cmd->add_option("--seed", copt.seed, "Master seed");
    cmd->add_option("--workers", copt.workers, "Worker thread count");
    cmd->add_option("--output", copt.output, "CSV output path (default stdout)");
    cmd->add_flag("--timings", copt.timings, "Include wall-clock columns in the CSV");
    cmd->add_option("--t0", copt.t0, "Interval start");
    cmd->add_option("--T", copt.T, "Interval end");
  };
  auto* strong = convergence->add_subcommand("strong", "Strong (mean-square) order");
  strong->fallthrough();
  add_convergence_flags(strong);
  auto* weak = convergence->add_subcommand("weak", "Weak order for E f(X_T)");
  weak->fallthrough();
  add_convergence_flags(weak);

  // stability
  auto* stability_cmd = app.add_subcommand("stability", "Mean-square stability analysis");
  stability_cmd->fallthrough();
  stability_cmd->require_subcommand(1);
  StabilityOptions sopt;
  auto* region = stability_cmd->add_subcommand("region", "Scan stability boundaries");
  region->fallthrough();
  auto* point = stability_cmd->add_subcommand("point", "Classify a single parameter point");
  point->fallthrough();
  for (CLI::App* cmd : {region, point}) {
    cmd->add_option("--problem", sopt.problem, "orthogonal | oscillator");
    cmd->add_option("--b-h", sopt.bh, "Orthogonal-noise shear b*h");
    cmd->add_option("--omega2-h", sopt.omega2h, "Oscillator frequency omega^2*h (accepts 'pi')");
    cmd->add_option("--implicit-variant", sopt.implicit_variant,
                    "Implicit Platen matrix: printed | derived");
    cmd->add_option("--output", sopt.output, "CSV output path (default stdout)");
  }
  region->add_option("--lambda-min", sopt.lambda_min, "Scan start in lambda*h");
  region->add_option("--lambda-max", sopt.lambda_max, "Scan end in lambda*h");
  region->add_option("--columns", sopt.columns, "Number of lambda*h columns");
  region->add_option("--sigma2-max", sopt.sigma2_max, "Scan ceiling in sigma^2*h");
  region->add_option("--workers", sopt.workers, "Worker thread count");
  point->add_option("--lambda-h", sopt.lambda_h, "lambda*h");
  point->add_option("--sigma2-h", sopt.sigma2_h, "sigma^2*h");

  // simulate
  SimulateOptions mopt;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo second-moment evolution");
  simulate->fallthrough();
  simulate->set_help_flag("--help", "Print this help message and exit");
  simulate->add_option("--problem", mopt.problem, "orthogonal | oscillator");
  simulate->add_option("--b-h", mopt.bh, "Orthogonal-noise shear b*h");
  simulate->add_option("--omega2-h", mopt.omega2h, "Oscillator frequency omega^2*h");
  simulate->add_option("--lambda-h", mopt.lambda_h, "lambda*h");
  simulate->add_option("--sigma2-h", mopt.sigma2_h, "sigma^2*h");
  simulate->add_option("--h", mopt.h, "Step size");
  simulate->add_option("--steps", mopt.steps, "Step count");
  simulate->add_option("--paths", mopt.paths, "Path count");
  simulate->add_option("--schemes", mopt.schemes, "Comma-separated scheme ids");
  simulate->add_option("--x0", mopt.x0, "Initial state, e.g. 1,1");
  simulate->add_option("--seed", mopt.seed, "Master seed");
  simulate->add_option("--workers", mopt.workers, "Worker thread count");
  simulate->add_option("--output", mopt.output, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (strong->parsed()) return run_convergence_strong(copt);
    if (weak->parsed()) return run_convergence_weak(copt);
    if (region->parsed()) return run_stability_region(sopt);
    if (point->parsed()) return run_stability_point(sopt);
    if (simulate->parsed()) return run_simulate(mopt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
