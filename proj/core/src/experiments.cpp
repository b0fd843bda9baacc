// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#include "sdelawson/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "sdelawson/parallel.hpp"

namespace sdelawson {

void parallel_chunks(std::int64_t items, std::int64_t chunk_size, int workers,
                     const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& body) {
  if (items <= 0) return;
  if (chunk_size < 1) chunk_size = 1;
  const std::int64_t chunks = (items + chunk_size - 1) / chunk_size;

  if (workers <= 1 || chunks == 1) {
    for (std::int64_t c = 0; c < chunks; ++c) {
      body(c * chunk_size, std::min(items, (c + 1) * chunk_size), c);
    }
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&]() {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= chunks) break;
      try {
        body(c * chunk_size, std::min(items, (c + 1) * chunk_size), c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = static_cast<int>(std::min<std::int64_t>(workers, chunks));
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) {
    pool.emplace_back(run);
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace sdelawson

namespace sdelawson::experiments {

namespace {

constexpr std::int64_t kPathChunk = 64;

// --- Student-t quantile via the regularized incomplete beta function ------

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, int dof) {
  const double nu = dof;
  const double ib = regularized_incomplete_beta(0.5 * nu, 0.5, nu / (nu + t * t));
  return t >= 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

} // namespace

double student_t_quantile(double p, int dof) {
  if (dof < 1) {
    throw std::invalid_argument("student_t_quantile: need at least one degree of freedom");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("student_t_quantile: p must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  const bool upper = p > 0.5;
  const double target = upper ? p : 1.0 - p;
  double lo = 0.0, hi = 1.0;
  while (student_t_cdf(hi, dof) < target) {
    hi *= 2.0;
    if (hi > 1e12) break;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, dof) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-12 * (1.0 + hi)) break;
  }
  const double q = 0.5 * (lo + hi);
  return upper ? q : -q;
}

double confidence_interval(const std::vector<double>& batch_means, double level) {
  const int n = static_cast<int>(batch_means.size());
  if (n < 2) {
    throw std::invalid_argument("confidence_interval: need at least two batches");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("confidence_interval: level must lie in (0, 1)");
  }
  const double mean = std::accumulate(batch_means.begin(), batch_means.end(), 0.0) / n;
  double ss = 0.0;
  for (double m : batch_means) {
    ss += (m - mean) * (m - mean);
  }
  const double sd = std::sqrt(ss / (n - 1));
  const double t = student_t_quantile(0.5 * (1.0 + level), n - 1);
  return t * sd / std::sqrt(static_cast<double>(n));
}

OrderFit estimate_order(const std::vector<double>& h, const std::vector<double>& errors) {
  if (h.size() != errors.size()) {
    throw std::invalid_argument("estimate_order: h and error lists differ in length");
  }
  if (h.size() < 3) {
    throw std::invalid_argument("estimate_order: need at least three points");
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0)) throw std::invalid_argument("estimate_order: step sizes must be positive");
    if (!(errors[i] > 0.0)) throw std::invalid_argument("estimate_order: errors must be positive");
    for (std::size_t j = i + 1; j < h.size(); ++j) {
      if (h[i] == h[j]) throw std::invalid_argument("estimate_order: duplicated step size");
    }
  }
  const std::size_t n = h.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log2(h[i]);
    const double y = std::log2(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  OrderFit fit;
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

// --- Monte Carlo harness ----------------------------------------------------

namespace {

struct LevelPlan {
  double h = 0.0;
  int steps = 0;
  int coarsen_factor = 1; // fine steps per coarse step
};

struct HarnessPlan {
  double t0 = 0.0, T = 1.0;
  std::vector<LevelPlan> levels;
  int reference_steps = 0;
  double reference_h = 0.0;
  bool need_dz = false;
  long total_paths = 0;
};

int steps_for(double t0, double T, double h) {
  const double raw = (T - t0) / h;
  const long long steps = std::llround(raw);
  if (steps < 1 || std::abs(steps * h - (T - t0)) > 1e-9 * (T - t0)) {
    std::ostringstream msg;
    msg << "step size " << h << " does not divide the interval length " << (T - t0);
    throw std::invalid_argument(msg.str());
  }
  return static_cast<int>(steps);
}

HarnessPlan make_plan(double t0, double T, const ExperimentConfig& config, bool with_reference,
                      const std::vector<RegisteredScheme>& schemes,
                      const RegisteredScheme* reference) {
  if (!(t0 < T)) throw std::invalid_argument("experiment needs t0 < T");
  if (config.h_values.empty()) throw std::invalid_argument("experiment needs at least one h");
  if (config.batches < 1 || config.paths_per_batch < 1) {
    throw std::invalid_argument("experiment needs positive batch and path counts");
  }
  std::vector<double> hs = config.h_values;
  std::sort(hs.begin(), hs.end(), std::greater<double>());
  for (std::size_t i = 0; i + 1 < hs.size(); ++i) {
    if (hs[i] == hs[i + 1]) throw std::invalid_argument("duplicate h value in experiment");
  }

  HarnessPlan plan;
  plan.t0 = t0;
  plan.T = T;
  const double h_min = hs.back();
  int fine_steps = steps_for(t0, T, h_min);
  double fine_h = h_min;
  if (with_reference) {
    if (config.reference_refinement < 1) {
      throw std::invalid_argument("reference refinement must be >= 1");
    }
    fine_steps *= config.reference_refinement;
    fine_h = h_min / config.reference_refinement;
  }
  plan.reference_steps = fine_steps;
  plan.reference_h = fine_h;

  for (double h : hs) {
    LevelPlan level;
    level.h = h;
    level.steps = steps_for(t0, T, h);
    if (fine_steps % level.steps != 0) {
      throw std::invalid_argument("reference step size must divide every experiment h");
    }
    level.coarsen_factor = fine_steps / level.steps;
    plan.levels.push_back(level);
  }

  for (const auto& s : schemes) {
    plan.need_dz = plan.need_dz || s.needs_dz;
  }
  if (reference != nullptr) {
    plan.need_dz = plan.need_dz || reference->needs_dz;
  }
  plan.total_paths = static_cast<long>(config.batches) * config.paths_per_batch;
  return plan;
}

SemiLinearSde problem_for_scheme(const SemiLinearSde& problem, const RegisteredScheme& scheme) {
  if (scheme.native_calculus == problem.interpretation) {
    return problem;
  }
  return scheme.native_calculus == Interpretation::Ito ? ito_from_stratonovich(problem)
                                                       : stratonovich_from_ito(problem);
}

struct BatchStats {
  double mean = 0.0;
  std::vector<double> batch_means;
};

// Mean over all paths plus per-batch means, skipping NaN (divergent) paths.
BatchStats batch_reduce(const std::vector<double>& per_path, int batches, int paths_per_batch) {
  BatchStats stats;
  stats.batch_means.reserve(static_cast<std::size_t>(batches));
  double total = 0.0;
  long total_count = 0;
  for (int b = 0; b < batches; ++b) {
    double sum = 0.0;
    int count = 0;
    for (int p = 0; p < paths_per_batch; ++p) {
      const double v = per_path[static_cast<std::size_t>(b) * paths_per_batch + p];
      if (std::isnan(v)) continue;
      sum += v;
      ++count;
    }
    stats.batch_means.push_back(count > 0 ? sum / count : 0.0);
    total += sum;
    total_count += count;
  }
  stats.mean = total_count > 0 ? total / total_count : 0.0;
  return stats;
}

} // namespace

ExperimentResult strong_error(const SemiLinearSde& problem, double t0, double T,
                              const Vector& x0, const ExperimentConfig& config) {
  std::vector<RegisteredScheme> schemes;
  schemes.reserve(config.schemes.size());
  for (const auto& id : config.schemes) {
    schemes.push_back(parse_scheme(id));
  }
  const RegisteredScheme reference = parse_scheme(config.reference_scheme);
  const HarnessPlan plan = make_plan(t0, T, config, /*with_reference=*/true, schemes, &reference);

  std::vector<SemiLinearSde> scheme_problems;
  scheme_problems.reserve(schemes.size());
  for (const auto& s : schemes) {
    scheme_problems.push_back(problem_for_scheme(problem, s));
  }
  const SemiLinearSde reference_problem = problem_for_scheme(problem, reference);

  const std::size_t n_schemes = schemes.size();
  const std::size_t n_levels = plan.levels.size();
  const std::size_t n_paths = static_cast<std::size_t>(plan.total_paths);

  // err[(scheme * levels + level) * paths + path]; NaN marks divergence.
  std::vector<double> per_path(n_schemes * n_levels * n_paths, 0.0);
  std::vector<double> per_path_seconds(n_schemes * n_levels * n_paths, 0.0);
  std::atomic<long> divergent{0};

  const IntegrationGrid ref_grid = make_grid(t0, T, plan.reference_steps, x0);

  parallel_chunks(plan.total_paths, kPathChunk, config.workers,
                  [&](std::int64_t begin, std::int64_t end, std::int64_t) {
    for (std::int64_t path = begin; path < end; ++path) {
      const NoiseGrid fine = sample_grid(config.seed, static_cast<std::uint64_t>(path),
                                         problem.channels(), plan.reference_steps,
                                         plan.reference_h, plan.need_dz);
      Vector ref_final;
      try {
        auto method = make_method(reference_problem, reference);
        ref_final = integrate_final(reference_problem, *method, ref_grid, fine);
      } catch (const DivergenceError&) {
        divergent.fetch_add(static_cast<long>(n_schemes * n_levels));
        for (std::size_t s = 0; s < n_schemes; ++s) {
          for (std::size_t l = 0; l < n_levels; ++l) {
            per_path[(s * n_levels + l) * n_paths + static_cast<std::size_t>(path)] =
                std::numeric_limits<double>::quiet_NaN();
          }
        }
        continue;
      }

      for (std::size_t l = 0; l < n_levels; ++l) {
        const LevelPlan& level = plan.levels[l];
        const NoiseGrid coarse = coarsen(fine, level.coarsen_factor);
        const IntegrationGrid grid = make_grid(t0, T, level.steps, x0);
        for (std::size_t s = 0; s < n_schemes; ++s) {
          const std::size_t slot = (s * n_levels + l) * n_paths + static_cast<std::size_t>(path);
          const auto start = std::chrono::steady_clock::now();
          try {
            auto method = make_method(scheme_problems[s], schemes[s]);
            const Vector y = integrate_final(scheme_problems[s], *method, grid, coarse);
            per_path[slot] = (y - ref_final).norm();
          } catch (const DivergenceError&) {
            per_path[slot] = std::numeric_limits<double>::quiet_NaN();
            divergent.fetch_add(1);
          }
          per_path_seconds[slot] =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
      }
    }
  });

  ExperimentResult result;
  result.divergent_paths = divergent.load();
  result.total_runs = static_cast<long>(n_schemes * n_levels * n_paths);
  result.divergence_threshold_exceeded =
      result.divergent_paths > config.divergence_fail_fraction * result.total_runs;

  for (std::size_t s = 0; s < n_schemes; ++s) {
    ErrorTable table;
    table.scheme = schemes[s].id;
    for (std::size_t l = 0; l < n_levels; ++l) {
      const std::size_t base = (s * n_levels + l) * n_paths;
      std::vector<double> slice(per_path.begin() + base, per_path.begin() + base + n_paths);
      const BatchStats stats = batch_reduce(slice, config.batches, config.paths_per_batch);
      table.h.push_back(plan.levels[l].h);
      table.error.push_back(stats.mean);
      table.ci_halfwidth.push_back(confidence_interval(stats.batch_means));
      double seconds = 0.0;
      for (std::size_t p = 0; p < n_paths; ++p) {
        seconds += per_path_seconds[base + p];
      }
      table.wall_seconds.push_back(seconds);
    }
    if (table.h.size() >= 3) {
      bool positive = true;
      for (double e : table.error) positive = positive && e > 0.0;
      if (positive) {
        const OrderFit fit = estimate_order(table.h, table.error);
        table.slope = fit.slope;
        table.intercept = fit.intercept;
      }
    }
    result.tables.push_back(std::move(table));
  }
  return result;
}

ExperimentResult weak_error(const SemiLinearSde& problem, double t0, double T, const Vector& x0,
                            const ExperimentConfig& config, const WeakObservable& observable) {
  if (!observable.f) {
    throw std::invalid_argument("weak_error: functional f is required");
  }
  if (!observable.exact_path_value && !observable.expectation &&
      !observable.use_simulated_reference) {
    throw std::invalid_argument("weak_error: need an exact path value, a simulated reference, "
                                "or a constant expectation");
  }
  std::vector<RegisteredScheme> schemes;
  for (const auto& id : config.schemes) {
    schemes.push_back(parse_scheme(id));
  }
  std::optional<RegisteredScheme> reference;
  if (observable.use_simulated_reference) {
    reference = parse_scheme(config.reference_scheme);
  }
  const HarnessPlan plan = make_plan(t0, T, config, observable.use_simulated_reference, schemes,
                                     reference ? &*reference : nullptr);

  std::vector<SemiLinearSde> scheme_problems;
  for (const auto& s : schemes) {
    scheme_problems.push_back(problem_for_scheme(problem, s));
  }
  std::optional<SemiLinearSde> reference_problem;
  if (reference) {
    reference_problem = problem_for_scheme(problem, *reference);
  }

  const std::size_t n_schemes = schemes.size();
  const std::size_t n_levels = plan.levels.size();
  const std::size_t n_paths = static_cast<std::size_t>(plan.total_paths);

  std::vector<double> per_path(n_schemes * n_levels * n_paths, 0.0);
  std::vector<double> per_path_seconds(n_schemes * n_levels * n_paths, 0.0);
  std::atomic<long> divergent{0};

  parallel_chunks(plan.total_paths, kPathChunk, config.workers,
                  [&](std::int64_t begin, std::int64_t end, std::int64_t) {
    for (std::int64_t path = begin; path < end; ++path) {
      const NoiseGrid fine = sample_grid(config.seed, static_cast<std::uint64_t>(path),
                                         problem.channels(), plan.reference_steps,
                                         plan.reference_h, plan.need_dz);
      double path_reference = 0.0;
      bool path_ok = true;
      if (observable.exact_path_value) {
        path_reference = observable.exact_path_value(x0, t0, T, fine.terminal_increment());
      } else if (reference) {
        try {
          auto method = make_method(*reference_problem, *reference);
          const IntegrationGrid ref_grid = make_grid(t0, T, plan.reference_steps, x0);
          path_reference =
              observable.f(integrate_final(*reference_problem, *method, ref_grid, fine));
        } catch (const DivergenceError&) {
          path_ok = false;
        }
      }
      if (!path_ok) {
        divergent.fetch_add(static_cast<long>(n_schemes * n_levels));
        for (std::size_t s = 0; s < n_schemes; ++s) {
          for (std::size_t l = 0; l < n_levels; ++l) {
            per_path[(s * n_levels + l) * n_paths + static_cast<std::size_t>(path)] =
                std::numeric_limits<double>::quiet_NaN();
          }
        }
        continue;
      }
      for (std::size_t l = 0; l < n_levels; ++l) {
        const LevelPlan& level = plan.levels[l];
        const NoiseGrid coarse = coarsen(fine, level.coarsen_factor);
        const IntegrationGrid grid = make_grid(t0, T, level.steps, x0);
        for (std::size_t s = 0; s < n_schemes; ++s) {
          const std::size_t slot = (s * n_levels + l) * n_paths + static_cast<std::size_t>(path);
          const auto start = std::chrono::steady_clock::now();
          try {
            auto method = make_method(scheme_problems[s], schemes[s]);
            const Vector y = integrate_final(scheme_problems[s], *method, grid, coarse);
            per_path[slot] = observable.f(y) - path_reference;
          } catch (const DivergenceError&) {
            per_path[slot] = std::numeric_limits<double>::quiet_NaN();
            divergent.fetch_add(1);
          }
          per_path_seconds[slot] =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
      }
    }
  });

  const double constant_reference =
      (observable.exact_path_value || observable.use_simulated_reference)
          ? 0.0
          : *observable.expectation;

  ExperimentResult result;
  result.divergent_paths = divergent.load();
  result.total_runs = static_cast<long>(n_schemes * n_levels * n_paths);
  result.divergence_threshold_exceeded =
      result.divergent_paths > config.divergence_fail_fraction * result.total_runs;

  for (std::size_t s = 0; s < n_schemes; ++s) {
    ErrorTable table;
    table.scheme = schemes[s].id;
    for (std::size_t l = 0; l < n_levels; ++l) {
      const std::size_t base = (s * n_levels + l) * n_paths;
      std::vector<double> slice(per_path.begin() + base, per_path.begin() + base + n_paths);
      const BatchStats stats = batch_reduce(slice, config.batches, config.paths_per_batch);
      table.h.push_back(plan.levels[l].h);
      table.error.push_back(std::abs(stats.mean - constant_reference));
      table.ci_halfwidth.push_back(confidence_interval(stats.batch_means));
      double seconds = 0.0;
      for (std::size_t p = 0; p < n_paths; ++p) {
        seconds += per_path_seconds[base + p];
      }
      table.wall_seconds.push_back(seconds);
    }
    if (table.h.size() >= 3) {
      bool positive = true;
      for (double e : table.error) positive = positive && e > 0.0;
      if (positive) {
        const OrderFit fit = estimate_order(table.h, table.error);
        table.slope = fit.slope;
        table.intercept = fit.intercept;
      }
    }
    result.tables.push_back(std::move(table));
  }
  return result;
}

MomentSeries moment_evolution(const SemiLinearSde& problem, const std::string& scheme_id,
                              double t0, const Vector& x0, double h, int steps, int paths,
                              std::uint64_t seed, int workers) {
  if (steps < 1 || paths < 1) {
    throw std::invalid_argument("moment_evolution: steps and paths must be positive");
  }
  const RegisteredScheme scheme = parse_scheme(scheme_id);
  const SemiLinearSde sde = problem_for_scheme(problem, scheme);
  const int d = sde.dim();

  const std::int64_t chunks = (paths + kPathChunk - 1) / kPathChunk;
  // Per-chunk, per-step sums of Y_i^2; reduced in chunk order afterwards.
  std::vector<Eigen::MatrixXd> chunk_sums(static_cast<std::size_t>(chunks),
                                          Eigen::MatrixXd::Zero(steps + 1, d));
  std::vector<std::vector<long>> chunk_counts(static_cast<std::size_t>(chunks),
                                              std::vector<long>(static_cast<std::size_t>(steps) + 1, 0));
  std::atomic<long> divergent{0};

  parallel_chunks(paths, kPathChunk, workers,
                  [&](std::int64_t begin, std::int64_t end, std::int64_t chunk) {
    auto& sums = chunk_sums[static_cast<std::size_t>(chunk)];
    auto& counts = chunk_counts[static_cast<std::size_t>(chunk)];
    for (std::int64_t path = begin; path < end; ++path) {
      const NoiseGrid noise = sample_grid(seed, static_cast<std::uint64_t>(path), sde.channels(),
                                          steps, h, scheme.needs_dz);
      auto method = make_method(sde, scheme);
      Vector y = x0;
      sums.row(0) += y.array().square().matrix().transpose();
      counts[0] += 1;
      for (int n = 0; n < steps; ++n) {
        bool diverged = false;
        try {
          y = method->step(t0 + n * h, y, at_step(noise, n));
        } catch (const DivergenceError&) {
          diverged = true;
        }
        if (diverged || !y.allFinite() || y.norm() > kBlowUpThreshold) {
          divergent.fetch_add(1);
          break;
        }
        sums.row(n + 1) += y.array().square().matrix().transpose();
        counts[static_cast<std::size_t>(n) + 1] += 1;
      }
    }
  });

  // A path that diverged at step k contributes nothing from k on; the series
  // is truncated at the first step missing a contribution.
  MomentSeries series;
  series.scheme = scheme_id;
  series.divergent_paths = divergent.load();
  int usable = steps + 1;
  std::vector<long> counts(static_cast<std::size_t>(steps) + 1, 0);
  for (std::int64_t c = 0; c < chunks; ++c) {
    for (int n = 0; n <= steps; ++n) {
      counts[static_cast<std::size_t>(n)] += chunk_counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(n)];
    }
  }
  for (int n = 0; n <= steps; ++n) {
    if (counts[static_cast<std::size_t>(n)] < paths) {
      usable = n;
      series.truncated = true;
      break;
    }
  }
  series.times.resize(static_cast<std::size_t>(usable));
  series.second_moment = Eigen::MatrixXd::Zero(usable, d);
  for (int n = 0; n < usable; ++n) {
    series.times[static_cast<std::size_t>(n)] = t0 + n * h;
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(d);
    for (std::int64_t c = 0; c < chunks; ++c) {
      sum += chunk_sums[static_cast<std::size_t>(c)].row(n);
    }
    series.second_moment.row(n) = sum / static_cast<double>(paths);
  }
  return series;
}

} // namespace sdelawson::experiments
