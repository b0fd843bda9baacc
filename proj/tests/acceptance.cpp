// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one self-contained check per shipped guarantee, each
// printing a PASS/FAIL line. The process exit code is the failure count.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sdelawson/experiments.hpp"
#include "sdelawson/problems.hpp"
#include "sdelawson/stability.hpp"
#include "textbook_oracles.hpp"

using namespace sdelawson;

namespace {

struct CheckContext {
  std::ostringstream detail;
  bool ok = true;

  void expect(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
  void note(const std::string& what) {
    detail << (detail.str().empty() ? "" : "; ") << what;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

SemiLinearSde random_commuting_linear(std::mt19937& rng, int d, int channels) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> coeff(-0.5, 0.5);
  Matrix base(d, d);
  for (int i = 0; i < d * d; ++i) base(i / d, i % d) = 0.6 * normal(rng);
  std::vector<Matrix> as;
  as.push_back(Matrix(coeff(rng) * base - 0.4 * Matrix::Identity(d, d)));
  for (int m = 0; m < channels; ++m) {
    as.push_back(Matrix(coeff(rng) * base + coeff(rng) * (base * base)));
  }
  std::vector<StateFunction> gs(static_cast<std::size_t>(channels) + 1);
  return make_semilinear_sde(Interpretation::Ito, std::move(as), std::move(gs), {}, 1e-8);
}

SemiLinearSde random_semilinear(std::mt19937& rng, int channels) {
  SemiLinearSde sde = random_commuting_linear(rng, 2, channels);
  for (int m = 0; m <= channels; ++m) {
    const double amp = 0.25 + 0.05 * m;
    sde.g[static_cast<std::size_t>(m)] = [amp](double t, const Vector& x) {
      Vector v(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        v[i] = amp * std::sin(x[i] + 0.1 * t) + 0.04 * x[i] * x[i];
      }
      return v;
    };
    sde.g_jacobian[static_cast<std::size_t>(m)] = [amp](double t, const Vector& x) {
      Matrix j = Matrix::Zero(x.size(), x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        j(i, i) = amp * std::cos(x[i] + 0.1 * t) + 0.08 * x[i];
      }
      return j;
    };
  }
  return sde;
}

// --------------------------------------------------------------------------
// 1. Lawson exactness on purely linear SDEs
// --------------------------------------------------------------------------
bool criterion_1(CheckContext& ctx) {
  std::mt19937 rng(20260801);
  std::uniform_int_distribution<int> dim_dist(1, 3);
  std::uniform_int_distribution<int> chan_dist(1, 2);
  const int steps = 1000;
  double worst = 0.0;
  for (int sys = 0; sys < 50; ++sys) {
    const int d = dim_dist(rng);
    const int channels = chan_dist(rng);
    const auto sde = random_commuting_linear(rng, d, channels);
    Vector x0 = Vector::Zero(d);
    for (int i = 0; i < d; ++i) x0[i] = 1.0 + 0.1 * i;
    const auto grid = make_grid(0.0, 1.0, steps, x0);
    const NoiseGrid noise = sample_grid(1000 + static_cast<std::uint64_t>(sys), 0, channels,
                                        steps, 1.0 / steps, channels == 1);
    const Vector exact = exact_linear_solution(sde, 0.0, 1.0, x0, noise.terminal_increment());

    std::vector<SrkTableau> tabs = {tableau_euler_maruyama(), tableau_midpoint()};
    if (channels == 1) {
      tabs.push_back(tableau_platen());
      tabs.push_back(tableau_platen_strong_15());
      tabs.push_back(tableau_platen_weak_2());
    }
    for (const auto& tab : tabs) {
      auto problem = sde;
      if (tab.native_calculus == Interpretation::Stratonovich) {
        problem = stratonovich_from_ito(sde);
      }
      const Trajectory traj = integrate(problem, {tab, LawsonMode::Fsl}, grid, noise);
      const double rel = (traj.states.back() - exact).norm() / exact.norm();
      worst = std::max(worst, rel);
    }
  }
  ctx.note("max relative error " + fmt(worst) + " over 50 systems x schemes");
  ctx.expect(worst <= 1e-12, "exactness bound 1e-12 violated");
  return ctx.ok;
}

// --------------------------------------------------------------------------
// 2. Local/global equivalence
// --------------------------------------------------------------------------
bool criterion_2(CheckContext& ctx) {
  std::mt19937 rng(20260802);
  const int steps = 200;
  double worst = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    const auto ito = random_semilinear(rng, 1);
    const auto strat = stratonovich_from_ito(ito);
    const auto grid = make_grid(0.0, 1.0, steps, (Vector(2) << 1.0, -0.3).finished());
    const NoiseGrid noise =
        sample_grid(2000 + static_cast<std::uint64_t>(trial), 0, 1, steps, 1.0 / steps, true);
    for (const auto& tab : {tableau_euler_maruyama(), tableau_platen(), tableau_midpoint(),
                            tableau_platen_strong_15(), tableau_platen_weak_2()}) {
      const SemiLinearSde& problem =
          tab.native_calculus == Interpretation::Stratonovich ? strat : ito;
      const Trajectory local = integrate(problem, {tab, LawsonMode::Fsl}, grid, noise);
      const Trajectory global = integrate_global(problem, {tab, LawsonMode::Fsl}, grid, noise);
      for (std::size_t k = 0; k < local.states.size(); ++k) {
        const double rel =
            (local.states[k] - global.states[k]).norm() / (1.0 + local.states[k].norm());
        worst = std::max(worst, rel);
      }
    }
  }
  ctx.note("max pointwise relative gap " + fmt(worst));
  ctx.expect(worst <= 1e-8, "local/global gap above 1e-8");
  return ctx.ok;
}

// --------------------------------------------------------------------------
// 3. Underlying-scheme recovery against textbook oracles
// --------------------------------------------------------------------------
bool criterion_3(CheckContext& ctx) {
  std::mt19937 rng(20260803);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Matrix> zero = {Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
  auto g0 = [](double t, const Vector& x) {
    Vector v(2);
    v << std::sin(x[0]) + 0.1 * t, x[0] * x[1];
    return v;
  };
  auto g1 = [](double t, const Vector& x) {
    Vector v(2);
    v << 0.3 * x[1] + 0.05 * t, std::cos(x[0]);
    return v;
  };
  const auto ito = make_semilinear_sde(Interpretation::Ito, zero, {g0, g1});
  auto strat = ito;
  strat.interpretation = Interpretation::Stratonovich;
  const oracles::Coefficient a = g0;
  const oracles::Coefficient b = g1;

  double worst = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    Vector y(2);
    y << 0.8 + 0.2 * normal(rng), 0.4 * normal(rng);
    const double h = 0.02 + 0.01 * std::abs(normal(rng));
    const double t = 0.3 * std::abs(normal(rng));
    const double dw = std::sqrt(h) * normal(rng);
    StepNoise n;
    n.h = h;
    n.dW = Vector::Constant(1, dw);
    n.dZ = 0.5 * h * (dw + std::sqrt(h) * normal(rng) / std::sqrt(3.0));

    const auto gap = [&](const Vector& got, const Vector& want) {
      return (got - want).cwiseAbs().maxCoeff() / (1.0 + want.cwiseAbs().maxCoeff());
    };
    worst = std::max(worst, gap(srk_lawson_step(ito, {tableau_euler_maruyama(), LawsonMode::Fsl},
                                                y, t, n),
                                oracles::euler_maruyama(a, b, t, y, h, dw)));
    worst = std::max(worst, gap(srk_lawson_step(ito, {tableau_platen(), LawsonMode::Fsl}, y, t, n),
                                oracles::platen(a, b, t, y, h, dw)));
    worst = std::max(worst, gap(srk_lawson_step(strat, {tableau_midpoint(), LawsonMode::Fsl},
                                                y, t, n),
                                oracles::midpoint(a, {b}, t, y, h, n.dW)));
    worst = std::max(worst,
                     gap(srk_lawson_step(ito, {tableau_platen_strong_15(), LawsonMode::Fsl}, y, t, n),
                         oracles::platen_strong_15(a, b, t, y, h, dw, *n.dZ)));
    worst = std::max(worst,
                     gap(srk_lawson_step(ito, {tableau_platen_weak_2(), LawsonMode::Fsl}, y, t, n),
                         oracles::platen_weak_2(a, b, t, y, h, dw)));
  }
  ctx.note("max relative gap to the textbook formulas " + fmt(worst));
  ctx.expect(worst <= 1e-13, "scheme recovery above 1e-13");
  return ctx.ok;
}

// --------------------------------------------------------------------------
// 4. Strong convergence orders on the oscillator test problem
// --------------------------------------------------------------------------
std::vector<double> parse_h() {
  std::vector<double> out;
  for (int k = 6; k <= 11; ++k) out.push_back(std::pow(2.0, -k));
  return out;
}

bool criterion_4(CheckContext& ctx) {
  const auto problem = problems::nonlinear_oscillator(1.0);
  experiments::ExperimentConfig config;
  config.schemes = {"em-dsl", "platen-dsl", "midpoint-fsl", "platen15-dsl"};
  config.h_values = parse_h();
  config.batches = 8;
  config.paths_per_batch = 50;
  config.reference_scheme = "platen15-dsl";
  config.reference_refinement = 64;
  config.seed = 42;
  config.workers = 4;
  const Vector x0 = (Vector(2) << 1.0, 0.0).finished();
  const auto result = experiments::strong_error(problem, 0.0, 1.0, x0, config);

  const struct {
    const char* id;
    double order, tol;
  } bands[] = {{"em-dsl", 0.5, 0.15},
               {"platen-dsl", 1.0, 0.15},
               {"midpoint-fsl", 1.0, 0.15},
               {"platen15-dsl", 1.5, 0.2}};
  for (const auto& band : bands) {
    for (const auto& table : result.tables) {
      if (table.scheme == band.id) {
        ctx.note(std::string(band.id) + " slope " + fmt(table.slope));
        ctx.expect(std::abs(table.slope - band.order) <= band.tol,
                   std::string(band.id) + " slope outside " + fmt(band.order) + "+-" +
                       fmt(band.tol));
      }
    }
  }
  ctx.expect(result.divergent_paths == 0, "divergent paths in the order measurement");

  // lambda = 5 error ordering at h = 2^-8: exponential handling of the stiff
  // drift must not increase the error.
  const auto stiff = problems::nonlinear_oscillator(5.0);
  experiments::ExperimentConfig oconfig;
  oconfig.schemes = {"em", "em-dsl", "platen", "platen-dsl"};
  oconfig.h_values = {std::pow(2.0, -8)};
  oconfig.batches = 8;
  oconfig.paths_per_batch = 50;
  oconfig.reference_scheme = "platen15-dsl";
  oconfig.reference_refinement = 64;
  oconfig.seed = 43;
  oconfig.workers = 4;
  const auto ordering = experiments::strong_error(stiff, 0.0, 1.0, x0, oconfig);
  const auto err_of = [&](const std::string& id) {
    for (const auto& t : ordering.tables) {
      if (t.scheme == id) return t.error[0];
    }
    return -1.0;
  };
  ctx.note("lambda=5 errors: em " + fmt(err_of("em")) + " vs em-dsl " + fmt(err_of("em-dsl")) +
           ", platen " + fmt(err_of("platen")) + " vs platen-dsl " + fmt(err_of("platen-dsl")));
  ctx.expect(err_of("em-dsl") <= err_of("em"), "em-dsl error above em");
  ctx.expect(err_of("platen-dsl") <= err_of("platen"), "platen-dsl error above platen");
  return ctx.ok;
}

// --------------------------------------------------------------------------
// 5. Weak convergence orders on scalar GBM with the analytic reference
// --------------------------------------------------------------------------
bool criterion_5(CheckContext& ctx) {
  // GBM with total drift lambda = -1 and mu = 0.5; the exponential handles
  // A_0 = -1.5 so that g_0 = +0.5 x is a genuine remainder and the
  // first-order schemes show their weak order with an O(1) constant.
  const double lambda = -1.0, mu = 0.5, split = -1.5;
  const auto problem = problems::scalar_linear(split, lambda - split, mu);
  experiments::ExperimentConfig config;
  config.schemes = {"em-dsl", "platen-dsl", "platen-weak2-dsl"};
  config.h_values = {std::pow(2.0, -3), std::pow(2.0, -4), std::pow(2.0, -5), std::pow(2.0, -6),
                     std::pow(2.0, -7)};
  config.batches = 40;
  config.paths_per_batch = 2500;
  config.seed = 2026;
  config.workers = 4;
  experiments::WeakObservable obs;
  obs.f = [](const Vector& x) { return x[0] * x[0]; };
  obs.exact_path_value = [lambda, mu](const Vector& x0, double t0, double T, const Vector& w) {
    const double xt = x0[0] * std::exp((lambda - 0.5 * mu * mu) * (T - t0) + mu * w[0]);
    return xt * xt;
  };
  const auto result =
      experiments::weak_error(problem, 0.0, 1.0, Vector::Constant(1, 1.0), config, obs);
  for (const auto& table : result.tables) {
    ctx.note(table.scheme + " slope " + fmt(table.slope));
    if (table.scheme == "platen-weak2-dsl") {
      ctx.expect(table.slope >= 1.6, "platen-weak2-dsl slope below 1.6");
    } else {
      ctx.expect(std::abs(table.slope - 1.0) <= 0.3, table.scheme + " slope outside 1.0+-0.3");
    }
  }
  return ctx.ok;
}

// --------------------------------------------------------------------------
// 6. Stability-point classification, orthogonal noise (paper marks)
// --------------------------------------------------------------------------
bool criterion_6(CheckContext& ctx) {
  using stability::BoundaryKind;
  const stability::RegionProblem ortho{stability::RegionProblem::Kind::OrthogonalNoise, 1.0, 0.0};
  // Pinned implicit variant: the derived (drift-implicit) propagator; the
  // printed form fails the oscillator classification (criterion 7).
  const auto impl = BoundaryKind::ImplicitPlatenDerived;

  const double em_a = stability::point_rho(ortho, BoundaryKind::EmDsl, -2.0, 2.5);
  const double pl_a = stability::point_rho(ortho, BoundaryKind::PlatenDsl, -2.0, 2.5);
  const double im_a = stability::point_rho(ortho, impl, -2.0, 2.5);
  ctx.note("lh=-2: em " + fmt(em_a) + ", platen " + fmt(pl_a) + ", implicit " + fmt(im_a));
  ctx.expect(em_a < 1.0, "em-dsl not stable at lh=-2");
  ctx.expect(pl_a < 1.0, "platen-dsl not stable at lh=-2");
  ctx.expect(im_a > 1.0, "implicit not unstable at lh=-2");

  const double em_b = stability::point_rho(ortho, BoundaryKind::EmDsl, -1.0, 2.5);
  const double pl_b = stability::point_rho(ortho, BoundaryKind::PlatenDsl, -1.0, 2.5);
  const double im_b = stability::point_rho(ortho, impl, -1.0, 2.5);
  ctx.note("lh=-1: em " + fmt(em_b) + ", platen " + fmt(pl_b) + ", implicit " + fmt(im_b));
  ctx.expect(em_b < 1.0, "em-dsl not stable at lh=-1");
  // Known-failing band: the Monte-Carlo-verified propagator has rho = 1.3934
  // here and the commonly printed closed-form variant gives 2.4888, so no
  // moment-exact stability matrix lands in [0.95, 1.10]. The band encodes a
  // qualitative "stays close to 1 on a log axis" observation; it is asserted
  // as written and expected to fail.
  ctx.expect(pl_b >= 0.95 && pl_b <= 1.10,
             "platen-dsl rho " + fmt(pl_b) +
                 " outside [0.95, 1.10]; no moment-exact propagator attains this band "
                 "(printed closed-form variant gives 2.4888)");
  ctx.expect(im_b > 1.0, "implicit not unstable at lh=-1");
  return ctx.ok;
}

// --------------------------------------------------------------------------
// 7. Oscillator classification and frequency invariance
// --------------------------------------------------------------------------
bool criterion_7(CheckContext& ctx) {
  using stability::BoundaryKind;
  const stability::RegionProblem osc{stability::RegionProblem::Kind::Oscillator, 0.0, M_PI};
  const auto impl = BoundaryKind::ImplicitPlatenDerived;

  // damped point
  const double em = stability::point_rho(osc, BoundaryKind::EmDsl, -0.3, 0.4);
  const double pl = stability::point_rho(osc, BoundaryKind::PlatenDsl, -0.3, 0.4);
  const double im = stability::point_rho(osc, impl, -0.3, 0.4);
  const double exact_damped = std::exp(-0.2);
  ctx.note("damped: em " + fmt(em) + ", platen " + fmt(pl) + ", implicit " + fmt(im));
  ctx.expect(em < 1.0 && pl < 1.0 && im < 1.0, "a scheme is unstable at the damped point");
  ctx.expect(std::abs(pl - exact_damped) < 0.01, "platen-dsl differs from e^{-0.2} by >= 0.01");
  ctx.expect(im < exact_damped, "implicit does not over-stabilise the damped oscillator");

  // driven point
  const double im_driven = stability::point_rho(osc, impl, -0.1, 0.4);
  const double pl_driven = stability::point_rho(osc, BoundaryKind::PlatenDsl, -0.1, 0.4);
  const double exact_driven = std::exp(0.2);
  ctx.note("driven: implicit " + fmt(im_driven) + ", platen " + fmt(pl_driven));
  ctx.expect(im_driven < 1.0, "implicit fails to (wrongly) damp the driven oscillator");
  ctx.expect(exact_driven > 1.0, "exact factor not unstable");
  ctx.expect(pl_driven >= 1.15 && pl_driven <= 1.30, "platen-dsl outside [1.15, 1.30]");

  // frequency invariance of the exponential schemes
  const stability::RegionProblem osc10{stability::RegionProblem::Kind::Oscillator, 0.0,
                                       10.0 * M_PI};
  for (auto kind : {BoundaryKind::EmDsl, BoundaryKind::PlatenDsl}) {
    const double a = stability::point_rho(osc, kind, -0.3, 0.4);
    const double b = stability::point_rho(osc10, kind, -0.3, 0.4);
    ctx.expect(std::abs(a - b) < 1e-10, "rho depends on omega^2 h");
  }
  return ctx.ok;
}

// --------------------------------------------------------------------------
// 8. Scalar stability functions against one-step Monte Carlo
// --------------------------------------------------------------------------
bool criterion_8(CheckContext& ctx) {
  struct Point {
    double lambda, sigma, mu, h;
  };
  const std::vector<Point> points = {{-2.0, 0.5, 1.0, 0.1},
                                     {-1.0, 0.3, 0.5, 0.2},
                                     {-0.5, -0.4, 0.8, 0.5},
                                     {-3.0, 1.0, 1.2, 0.05},
                                     {-1.5, 0.0, 0.7, 0.25}};
  const int samples = 1000000;
  for (const auto& p : points) {
    const auto sde = problems::scalar_linear(p.lambda, p.sigma, p.mu);
    for (const std::string id : {"em-dsl", "platen-dsl"}) {
      const RegisteredScheme scheme = parse_scheme(id);
      auto method = make_method(sde, scheme);
      double sum = 0.0, sumsq = 0.0;
      for (int i = 0; i < samples; ++i) {
        const NoiseGrid noise =
            sample_grid(555, static_cast<std::uint64_t>(i), 1, 1, p.h, false);
        const Vector y = method->step(0.0, Vector::Constant(1, 1.0), at_step(noise, 0));
        const double v = y[0] * y[0];
        sum += v;
        sumsq += v * v;
      }
      const double mean = sum / samples;
      const double se = std::sqrt((sumsq / samples - mean * mean) / samples);
      const double expected =
          id == "em-dsl"
              ? stability::R_em_dsl(p.h * p.lambda, p.h * p.sigma, std::sqrt(p.h) * p.mu)
              : stability::R_platen_dsl(p.h * p.lambda, p.h * p.sigma, std::sqrt(p.h) * p.mu);
      const double gap = std::abs(mean - expected);
      ctx.expect(gap <= 3.0 * se, id + " at (" + fmt(p.lambda) + "," + fmt(p.sigma) + "," +
                                      fmt(p.mu) + "," + fmt(p.h) + "): |MC - R| = " + fmt(gap) +
                                      " > 3 SE " + fmt(3.0 * se));
    }
  }
  if (ctx.ok) ctx.note("10 scheme/point combinations within 3 MC standard errors");
  return ctx.ok;
}

// --------------------------------------------------------------------------
// 9. Kronecker moment oracle against the scheme Monte Carlo
// --------------------------------------------------------------------------
bool criterion_9(CheckContext& ctx) {
  using stability::SchemeKind;
  // Mild noise and a near-neutral drift on purpose: strongly noisy or
  // strongly decaying moment products are carried by rare tail paths over
  // 100 steps, which makes the sample mean and its standard error unusable
  // at 10^5 paths. Here every path contributes comparably through step 100,
  // while the non-commuting correction block still shifts the moments by
  // well over four standard errors.
  const double h = 0.1, lambda_h = -0.02, bh = 0.3, s2h = 0.005;
  const auto problem = problems::orthogonal_noise(lambda_h / h, bh / h, std::sqrt(s2h / h));
  const Vector x0 = (Vector(2) << 1.0, 1.0).finished();
  Matrix rot(2, 2);
  rot << 0.0, 1.0, -1.0, 0.0;
  const Matrix abar = h * problem.A[0];
  const Matrix bbar = std::sqrt(s2h) * rot;

  const int paths = 100000;
  const std::vector<std::pair<std::string, SchemeKind>> cases = {
      {"em-dsl", SchemeKind::EmDsl},
      {"platen-dsl", SchemeKind::PlatenDsl},
      {"implicit-platen", SchemeKind::ImplicitPlatenDerived}};
  for (const auto& [id, kind] : cases) {
    const Matrix s = stability::scheme_stability_matrix(kind, abar, {bbar});
    // second-moment per-path accumulation at the probe steps, with variance
    // for the standard errors
    const std::vector<int> probes = {10, 50, 100};
    std::vector<double> sum(probes.size() * 2, 0.0), sumsq(probes.size() * 2, 0.0);
    const RegisteredScheme scheme = parse_scheme(id);
    long truncated = 0;
    for (int p = 0; p < paths; ++p) {
      const NoiseGrid noise =
          sample_grid(777, static_cast<std::uint64_t>(p), 1, 100, h, false);
      auto method = make_method(problem, scheme);
      Vector y = x0;
      std::size_t probe = 0;
      for (int n = 0; n < 100 && probe < probes.size(); ++n) {
        y = method->step(n * h, y, at_step(noise, n));
        if (!y.allFinite() || y.norm() > kBlowUpThreshold) {
          ++truncated;
          break;
        }
        if (n + 1 == probes[probe]) {
          for (int i = 0; i < 2; ++i) {
            const double v = y[i] * y[i];
            sum[probe * 2 + static_cast<std::size_t>(i)] += v;
            sumsq[probe * 2 + static_cast<std::size_t>(i)] += v * v;
          }
          ++probe;
        }
      }
    }
    ctx.expect(truncated == 0, id + ": " + std::to_string(truncated) + " paths blew up");

    Vector moment = linalg::vec(Matrix(x0 * x0.transpose()));
    int applied = 0;
    for (std::size_t probe = 0; probe < probes.size(); ++probe) {
      while (applied < probes[probe]) {
        moment = stability::scheme_moment_step(s, moment);
        ++applied;
      }
      const Matrix p_exact = linalg::unvec(moment, 2);
      for (int i = 0; i < 2; ++i) {
        const double mean = sum[probe * 2 + static_cast<std::size_t>(i)] / paths;
        const double var =
            sumsq[probe * 2 + static_cast<std::size_t>(i)] / paths - mean * mean;
        const double se = std::sqrt(std::max(var, 0.0) / paths);
        const double expected = p_exact(i, i);
        ctx.expect(std::abs(mean - expected) <= 4.0 * se,
                   id + " step " + std::to_string(probes[probe]) + " component " +
                       std::to_string(i + 1) + ": |MC - S^n| = " + fmt(std::abs(mean - expected)) +
                       " > 4 SE " + fmt(4.0 * se));
      }
    }
  }
  if (ctx.ok) ctx.note("3 schemes x 3 probe steps x 2 components within 4 MC standard errors");
  return ctx.ok;
}

// --------------------------------------------------------------------------
// 10. Deterministic path-norm law of the oscillator test problem
// --------------------------------------------------------------------------
bool criterion_10(CheckContext& ctx) {
  const auto problem = problems::nonlinear_oscillator(1.0);
  const int steps = 1024; // h = 2^-10
  const auto grid = make_grid(0.0, 1.0, steps, (Vector(2) << 1.0, 0.0).finished());
  const RegisteredScheme scheme = parse_scheme("platen15-dsl");
  const double target = std::exp(-0.98);
  double worst = 0.0;
  for (int p = 0; p < 100; ++p) {
    const NoiseGrid noise =
        sample_grid(888, static_cast<std::uint64_t>(p), 1, steps, 1.0 / steps, true);
    auto method = make_method(problem, scheme);
    const Vector y = integrate_final(problem, *method, grid, noise);
    worst = std::max(worst, std::abs(y.norm() - target) / target);
  }
  ctx.note("max relative deviation of |Y_N| from e^{-0.98}: " + fmt(worst));
  ctx.expect(worst < 0.005, "norm law violated beyond 0.5%");
  return ctx.ok;
}

// --------------------------------------------------------------------------
// 11. End-to-end determinism of a seeded CSV run across worker counts
// --------------------------------------------------------------------------
bool criterion_11(CheckContext& ctx) {
  const std::string base =
      std::string(SDELAWSON_CLI_PATH) +
      " convergence strong --problem oscillator --lambda 1 --schemes em-dsl,platen-dsl"
      " --h 2^-4..2^-6 --batches 4 --paths 8 --ref-refinement 8 --seed 31415";
  const std::string out1 = "/tmp/sdelawson_accept_w1.csv";
  const std::string out2 = "/tmp/sdelawson_accept_w3.csv";
  std::remove(out1.c_str());
  std::remove(out2.c_str());
  const int rc1 =
      std::system((base + " --workers 1 --output " + out1 + " >/dev/null 2>&1").c_str());
  const int rc2 =
      std::system((base + " --workers 3 --output " + out2 + " >/dev/null 2>&1").c_str());
  ctx.expect(WEXITSTATUS(rc1) == 0 && WEXITSTATUS(rc2) == 0, "CLI runs failed");

  const auto slurp = [](const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    std::string content;
    if (f) {
      char buf[4096];
      std::size_t got;
      while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) content.append(buf, got);
      std::fclose(f);
    }
    return content;
  };
  const std::string a = slurp(out1);
  const std::string b = slurp(out2);
  ctx.expect(!a.empty(), "empty CSV");
  ctx.expect(a == b, "CSV bytes differ between worker counts");
  if (ctx.ok) ctx.note("CSV byte-identical for workers 1 and 3 (" +
                       std::to_string(a.size()) + " bytes)");
  return ctx.ok;
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    std::function<bool(CheckContext&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "exponential schemes solve commuting linear SDEs exactly", criterion_1},
      {2, "local and global transformed integration produce the same points", criterion_2},
      {3, "zero linear parts recover the underlying textbook schemes", criterion_3},
      {4, "strong convergence orders on the oscillator problem", criterion_4},
      {5, "weak convergence orders on scalar GBM", criterion_5},
      {6, "stability classification, orthogonal-noise marks", criterion_6},
      {7, "stability classification, damped/driven oscillator marks", criterion_7},
      {8, "scalar stability functions match one-step Monte Carlo", criterion_8},
      {9, "moment iteration matches scheme Monte Carlo", criterion_9},
      {10, "deterministic path-norm law at fine steps", criterion_10},
      {11, "byte-identical CSV across worker counts", criterion_11},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    CheckContext ctx;
    bool ok = false;
    try {
      ok = criterion.run(ctx);
    } catch (const std::exception& e) {
      ctx.ok = false;
      ctx.note(std::string("exception: ") + e.what());
    }
    ok = ok && ctx.ok;
    if (!ok) ++failures;
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion.id << ": "
              << criterion.label;
    if (!ctx.detail.str().empty()) {
      std::cout << " (" << ctx.detail.str() << ")";
    }
    std::cout << std::endl;
  }
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed" << std::endl;
  }
  return failures;
}
