// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdelawson/model.hpp"
#include "sdelawson/schemes.hpp"

namespace sdelawson::experiments {

/// Least-squares fit of log2(error) against log2(h).
struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
};
OrderFit estimate_order(const std::vector<double>& h, const std::vector<double>& errors);

/// Student-t half-width of the `level` confidence interval on the mean of
/// the batch means. Needs at least two batches.
double confidence_interval(const std::vector<double>& batch_means, double level = 0.95);

/// Upper quantile helper used by confidence_interval; exposed for tests.
double student_t_quantile(double p, int dof);

struct ErrorTable {
  std::string scheme;
  std::vector<double> h;             // strictly decreasing
  std::vector<double> error;         // batch-mean error per h
  std::vector<double> ci_halfwidth;  // 95% half-width per h
  std::vector<double> wall_seconds;  // per h, summed over paths
  double slope = 0.0;
  double intercept = 0.0;
  long divergent_paths = 0;
};

struct ExperimentConfig {
  std::vector<std::string> schemes;
  std::vector<double> h_values;
  int batches = 20;
  int paths_per_batch = 50;
  std::string reference_scheme = "platen15-dsl";
  int reference_refinement = 64; // h_ref = h_min / this
  std::uint64_t seed = 0;
  int workers = 1;
  double divergence_fail_fraction = 1e-3;
};

struct ExperimentResult {
  std::vector<ErrorTable> tables;
  long divergent_paths = 0;
  long total_runs = 0;
  bool divergence_threshold_exceeded = false;
};

/// Strong error against a fine-step reference on the same Brownian paths:
/// per h, the mean over paths of |Y_N - Y_N^ref|_2, batched for the CI,
/// with the measured order from the log-log regression. Schemes consume
/// coarsened views of one noise grid per path; schemes whose tableau lives
/// in the other calculus get the converted problem.
ExperimentResult strong_error(const SemiLinearSde& problem, double t0, double T,
                              const Vector& x0, const ExperimentConfig& config);

/// Weak observable: f plus its reference. When the exact path value is
/// available (linear problems), the error estimator subtracts f(X_T^exact)
/// path by path, which removes the shared Monte Carlo offset; its
/// expectation still equals E f(Y_N) - E f(X_T). A simulated reference
/// (config.reference_scheme on the fine grid) does the same with the
/// reference solution in place of the exact one. Otherwise a constant
/// expectation is subtracted from the batch means.
struct WeakObservable {
  std::function<double(const Vector&)> f;
  std::function<double(const Vector& x0, double t0, double T, const Vector& wiener_total)>
      exact_path_value;
  bool use_simulated_reference = false;
  std::optional<double> expectation;
};

ExperimentResult weak_error(const SemiLinearSde& problem, double t0, double T, const Vector& x0,
                            const ExperimentConfig& config, const WeakObservable& observable);

/// Per-step Monte Carlo second moments E(Y_i^2), i = 1..d. A divergent path
/// truncates the series at its divergence step and sets the flag.
struct MomentSeries {
  std::string scheme;
  std::vector<double> times;      // steps+1 entries (or fewer when truncated)
  Eigen::MatrixXd second_moment;  // times.size() x d
  bool truncated = false;
  long divergent_paths = 0;
};

MomentSeries moment_evolution(const SemiLinearSde& problem, const std::string& scheme,
                              double t0, const Vector& x0, double h, int steps, int paths,
                              std::uint64_t seed, int workers = 1);

} // namespace sdelawson::experiments
