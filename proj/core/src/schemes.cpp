// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#include "sdelawson/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>

namespace sdelawson {

StepNoise at_step(const NoiseGrid& grid, int n) {
  StepNoise s;
  s.h = grid.step_size;
  s.dW = grid.dW.row(n).transpose();
  if (grid.dZ) {
    s.dZ = (*grid.dZ)[n];
  }
  return s;
}

// ---------------------------------------------------------------------------
// Tableaus
// ---------------------------------------------------------------------------

SrkTableau tableau_euler_maruyama() {
  SrkTableau t;
  t.name = "em";
  t.stages = 1;
  t.required_channels = -1;
  t.strong_order = 0.5;
  t.weak_order = 1.0;
  t.coefficients = [](int M, const StepNoise& n) {
    TableauCoefficients c;
    c.Z.assign(static_cast<std::size_t>(M) + 1, Matrix::Zero(1, 1));
    c.z.resize(static_cast<std::size_t>(M) + 1);
    c.z[0] = Vector::Constant(1, n.h);
    for (int m = 1; m <= M; ++m) {
      c.z[static_cast<std::size_t>(m)] = Vector::Constant(1, n.dW[m - 1]);
    }
    return c;
  };
  return t;
}

SrkTableau tableau_platen() {
  SrkTableau t;
  t.name = "platen";
  t.stages = 2;
  t.required_channels = 1;
  t.strong_order = 1.0;
  t.weak_order = 1.0;
  t.coefficients = [](int, const StepNoise& n) {
    const double h = n.h;
    const double dw = n.dW[0];
    const double q = (dw * dw - h) / (2.0 * std::sqrt(h));
    TableauCoefficients c;
    c.Z.assign(2, Matrix::Zero(2, 2));
    c.Z[0](1, 0) = h;
    c.Z[1](1, 0) = std::sqrt(h);
    c.z.resize(2);
    c.z[0] = Vector::Zero(2);
    c.z[0][0] = h;
    c.z[1] = Vector::Zero(2);
    c.z[1][0] = dw - q;
    c.z[1][1] = q;
    return c;
  };
  return t;
}

SrkTableau tableau_midpoint() {
  SrkTableau t;
  t.name = "midpoint";
  t.stages = 1;
  t.required_channels = -1;
  t.implicit = true;
  t.strong_order = 1.0; // commutative noise
  t.weak_order = 1.0;
  t.native_calculus = Interpretation::Stratonovich;
  t.coefficients = [](int M, const StepNoise& n) {
    TableauCoefficients c;
    c.Z.resize(static_cast<std::size_t>(M) + 1);
    c.z.resize(static_cast<std::size_t>(M) + 1);
    c.Z[0] = Matrix::Constant(1, 1, 0.5 * n.h);
    c.z[0] = Vector::Constant(1, n.h);
    for (int m = 1; m <= M; ++m) {
      c.Z[static_cast<std::size_t>(m)] = Matrix::Constant(1, 1, 0.5 * n.dW[m - 1]);
      c.z[static_cast<std::size_t>(m)] = Vector::Constant(1, n.dW[m - 1]);
    }
    return c;
  };
  return t;
}

SrkTableau tableau_platen_strong_15() {
  SrkTableau t;
  t.name = "platen15";
  t.stages = 5;
  t.required_channels = 1;
  t.needs_dz = true;
  t.strong_order = 1.5;
  t.weak_order = 1.5;
  t.coefficients = [](int, const StepNoise& n) {
    const double h = n.h;
    const double sh = std::sqrt(h);
    const double dw = n.dW[0];
    const double dz = *n.dZ;
    TableauCoefficients c;
    c.Z.assign(2, Matrix::Zero(5, 5));
    for (int i = 1; i < 5; ++i) {
      c.Z[0](i, 0) = h;
    }
    c.Z[1](1, 0) = sh;
    c.Z[1](2, 0) = -sh;
    c.Z[1](3, 0) = sh;
    c.Z[1](3, 1) = sh;
    c.Z[1](4, 0) = sh;
    c.Z[1](4, 1) = -sh;
    c.z.assign(2, Vector::Zero(5));
    c.z[0][0] = 0.5 * h;
    c.z[0][1] = dz / (2.0 * sh) + 0.25 * h;
    c.z[0][2] = -dz / (2.0 * sh) + 0.25 * h;
    const double p = (dw * dw - h) / sh;          // pairs with the (dW^2-h) bracket
    const double q = (dw * h - dz) / h;           // pairs with the (dW h - dZ) bracket
    const double r = 0.25 * (dw * dw / 3.0 - h) * dw / h;
    c.z[1][0] = dw - q;
    c.z[1][1] = 0.25 * p + 0.5 * q - r;
    c.z[1][2] = -0.25 * p + 0.5 * q + r;
    c.z[1][3] = r;
    c.z[1][4] = -r;
    return c;
  };
  return t;
}

SrkTableau tableau_platen_weak_2() {
  SrkTableau t;
  t.name = "platen-weak2";
  t.stages = 4;
  t.required_channels = 1;
  t.strong_order = 1.0;
  t.weak_order = 2.0;
  t.coefficients = [](int, const StepNoise& n) {
    const double h = n.h;
    const double sh = std::sqrt(h);
    const double dw = n.dW[0];
    const double q = (dw * dw - h) / sh;
    TableauCoefficients c;
    c.Z.assign(2, Matrix::Zero(4, 4));
    for (int i = 1; i < 4; ++i) {
      c.Z[0](i, 0) = h;
    }
    c.Z[1](1, 0) = dw;
    c.Z[1](2, 0) = sh;
    c.Z[1](3, 0) = -sh;
    c.z.assign(2, Vector::Zero(4));
    c.z[0][0] = 0.5 * h;
    c.z[0][1] = 0.5 * h;
    c.z[1][0] = 0.5 * dw;
    c.z[1][2] = 0.25 * dw + 0.25 * q;
    c.z[1][3] = 0.25 * dw - 0.25 * q;
    return c;
  };
  return t;
}

// ---------------------------------------------------------------------------
// Mode folding and the transformed remainders
// ---------------------------------------------------------------------------

namespace {

struct FoldedSde {
  const SemiLinearSde* sde = nullptr;
  int d = 0;
  int M = 0;
  double two_gamma = 0.0;          // 2 gamma* of the interpretation
  Matrix drift_base;               // A0_eff - gamma* sum Am_eff^2
  std::vector<Matrix> exp_noise;   // Am_eff for m = 1..M (empty when none in exponent)
  std::vector<Matrix> fold;        // A_m - Am_eff per channel m = 0..M (empty = zero)
  bool noise_in_exponent = false;
  bool exponent_zero = false;      // raw mode with A0_eff = 0

  Vector g_eff(int m, double t, const Vector& x) const {
    const auto& f = fold[static_cast<std::size_t>(m)];
    Vector v = f.size() > 0 ? Vector(f * x) : Vector::Zero(d);
    if (!sde->g_is_zero(m)) {
      v += sde->eval_g(m, t, x);
    }
    return v;
  }

  bool g_eff_zero(int m) const {
    return fold[static_cast<std::size_t>(m)].size() == 0 && sde->g_is_zero(m);
  }

  Vector gtilde(int m, double t, const Vector& x) const {
    if (m > 0) {
      return g_eff(m, t, x);
    }
    Vector out = g_eff(0, t, x);
    if (two_gamma != 0.0 && noise_in_exponent) {
      for (int ch = 1; ch <= M; ++ch) {
        if (!g_eff_zero(ch) && exp_noise[static_cast<std::size_t>(ch - 1)].size() > 0) {
          out -= two_gamma * (exp_noise[static_cast<std::size_t>(ch - 1)] * g_eff(ch, t, x));
        }
      }
    }
    return out;
  }

  bool gtilde_all_zero() const {
    for (int m = 0; m <= M; ++m) {
      if (!g_eff_zero(m)) return false;
    }
    return true;
  }
};

FoldedSde fold_sde(const SemiLinearSde& sde, LawsonMode mode) {
  FoldedSde f;
  f.sde = &sde;
  f.d = sde.dim();
  f.M = sde.channels();
  f.two_gamma = 2.0 * gamma_star(sde.interpretation);
  f.fold.resize(static_cast<std::size_t>(f.M) + 1);

  const auto keep = [&](int m) {
    if (mode == LawsonMode::Raw) return false;
    if (mode == LawsonMode::Dsl) return m == 0;
    return true;
  };

  f.exp_noise.resize(static_cast<std::size_t>(f.M));
  if (!keep(0) && !sde.A[0].isZero(0.0)) {
    f.fold[0] = sde.A[0];
  }
  f.drift_base = keep(0) ? sde.A[0] : Matrix(Matrix::Zero(f.d, f.d));
  const double gamma = gamma_star(sde.interpretation);
  for (int m = 1; m <= f.M; ++m) {
    const Matrix& am = sde.A[static_cast<std::size_t>(m)];
    if (am.isZero(0.0)) {
      continue;
    }
    if (keep(m)) {
      f.exp_noise[static_cast<std::size_t>(m - 1)] = am;
      f.noise_in_exponent = true;
      if (gamma != 0.0) {
        f.drift_base -= gamma * (am * am);
      }
    } else {
      f.fold[static_cast<std::size_t>(m)] = am;
    }
  }
  f.exponent_zero = !f.noise_in_exponent && f.drift_base.isZero(0.0);
  return f;
}

// ---------------------------------------------------------------------------
// Exponentials
// ---------------------------------------------------------------------------

struct ExpPair {
  bool identity = true;
  Matrix forward;
  Matrix backward;
};

ExpPair exponentiate(const Matrix& x) {
  if (x.isZero(0.0)) {
    return {};
  }
  ExpPair e;
  e.identity = false;
  e.forward = linalg::expm(x);
  e.backward = linalg::expm(-x);
  return e;
}

// Deterministic-exponent cache (drift-only modes): keyed by the scalar
// multiple of the drift base, which is all a tableau stage can produce.
struct ExpCache {
  std::vector<std::pair<double, ExpPair>> entries;

  const ExpPair& get(const FoldedSde& f, double c) {
    for (const auto& [key, value] : entries) {
      if (key == c) return value;
    }
    if (entries.size() >= 64) {
      entries.clear(); // tableau with random stage offsets; keep the cache bounded
    }
    entries.emplace_back(c, exponentiate(Matrix(f.drift_base * c)));
    return entries.back().second;
  }
};

Vector conjugated_eval(const FoldedSde& f, const ExpPair& e, int m, double t, const Vector& h_i) {
  if (e.identity) {
    return f.gtilde(m, t, h_i);
  }
  return e.backward * f.gtilde(m, t, Vector(e.forward * h_i));
}

// ---------------------------------------------------------------------------
// Generic step engine
// ---------------------------------------------------------------------------

struct EngineResult {
  Vector out;    // local: Y_{n+1}; global: V_{n+1}
  Matrix deltaL; // this step's exponent increment
};

bool tableau_is_explicit(const TableauCoefficients& tc) {
  for (const auto& zmat : tc.Z) {
    for (Eigen::Index i = 0; i < zmat.rows(); ++i) {
      for (Eigen::Index j = i; j < zmat.cols(); ++j) {
        if (zmat(i, j) != 0.0) return false;
      }
    }
  }
  return true;
}

EngineResult engine_step(const FoldedSde& f, const SrkTableau& tab, double t, const Vector& base,
                         const StepNoise& noise, ExpCache* cache, const Matrix* exponent_offset) {
  const int s = tab.stages;
  const int M = f.M;
  if (noise.dW.size() != M) {
    throw std::invalid_argument("step noise has wrong channel count");
  }
  if (tab.needs_dz && !noise.dZ) {
    throw std::invalid_argument(tab.name + " requires the dZ increment (sample the grid with need_dz)");
  }

  const TableauCoefficients tc = tab.coefficients(M, noise);
  if (static_cast<int>(tc.Z.size()) != M + 1 || static_cast<int>(tc.z.size()) != M + 1) {
    throw std::invalid_argument("tableau produced wrong channel count");
  }

  // Derived stage offsets c_m^i and increments c_m.
  Matrix c_stage(s, M + 1); // column m: c_m^i
  Vector c_total(M + 1);
  for (int m = 0; m <= M; ++m) {
    const auto& zmat = tc.Z[static_cast<std::size_t>(m)];
    if (zmat.rows() != s || zmat.cols() != s || tc.z[static_cast<std::size_t>(m)].size() != s) {
      throw std::invalid_argument("tableau produced wrong stage count");
    }
    for (int i = 0; i < s; ++i) {
      c_stage(i, m) = zmat.row(i).sum();
    }
    c_total[m] = tc.z[static_cast<std::size_t>(m)].sum();
  }

  // Stage exponents and the step exponent.
  const auto exponent_matrix = [&](double c0, const auto& cm_at) -> Matrix {
    Matrix x = f.drift_base * c0;
    if (f.noise_in_exponent) {
      for (int m = 1; m <= M; ++m) {
        const Matrix& am = f.exp_noise[static_cast<std::size_t>(m - 1)];
        if (am.size() > 0) {
          x += cm_at(m) * am;
        }
      }
    }
    return x;
  };

  std::vector<ExpPair> stage_exp(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) {
    if (exponent_offset == nullptr && cache != nullptr && !f.noise_in_exponent) {
      stage_exp[static_cast<std::size_t>(i)] = cache->get(f, c_stage(i, 0));
    } else {
      Matrix x = exponent_matrix(c_stage(i, 0), [&](int m) { return c_stage(i, m); });
      if (exponent_offset != nullptr) {
        x += *exponent_offset;
      }
      stage_exp[static_cast<std::size_t>(i)] = exponentiate(x);
    }
  }
  Matrix deltaL = exponent_matrix(c_total[0], [&](int m) { return c_total[m]; });

  // Stage values.
  std::vector<Vector> H(static_cast<std::size_t>(s), base);
  std::vector<std::vector<Vector>> phi(static_cast<std::size_t>(s),
                                       std::vector<Vector>(static_cast<std::size_t>(M) + 1));
  const auto fill_phi = [&](int i) {
    for (int m = 0; m <= M; ++m) {
      phi[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] = conjugated_eval(
          f, stage_exp[static_cast<std::size_t>(i)], m, t + c_stage(i, 0), H[static_cast<std::size_t>(i)]);
    }
  };

  if (tableau_is_explicit(tc)) {
    for (int i = 0; i < s; ++i) {
      Vector h_i = base;
      for (int j = 0; j < i; ++j) {
        for (int m = 0; m <= M; ++m) {
          const double w = tc.Z[static_cast<std::size_t>(m)](i, j);
          if (w != 0.0) {
            h_i += w * phi[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)];
          }
        }
      }
      H[static_cast<std::size_t>(i)] = std::move(h_i);
      fill_phi(i);
    }
  } else {
    // Stacked stage system solved by a modified Newton iteration: the
    // finite-difference Jacobian is assembled once per step at H_i = base.
    // Iterate to near round-off; only a residual still above the acceptance
    // threshold after 50 iterations is a failure.
    const int n_unknowns = s * f.d;
    const double tol = 1e-12 * (1.0 + base.norm());
    const double target = 1e-14 * (1.0 + base.norm());

    const auto residual = [&](const std::vector<Vector>& stages) {
      Vector r(n_unknowns);
      std::vector<std::vector<Vector>> ph(static_cast<std::size_t>(s),
                                          std::vector<Vector>(static_cast<std::size_t>(M) + 1));
      for (int i = 0; i < s; ++i) {
        for (int m = 0; m <= M; ++m) {
          ph[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] =
              conjugated_eval(f, stage_exp[static_cast<std::size_t>(i)], m, t + c_stage(i, 0),
                              stages[static_cast<std::size_t>(i)]);
        }
      }
      for (int i = 0; i < s; ++i) {
        Vector ri = stages[static_cast<std::size_t>(i)] - base;
        for (int j = 0; j < s; ++j) {
          for (int m = 0; m <= M; ++m) {
            const double w = tc.Z[static_cast<std::size_t>(m)](i, j);
            if (w != 0.0) {
              ri -= w * ph[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)];
            }
          }
        }
        r.segment(i * f.d, f.d) = ri;
      }
      return r;
    };

    Vector r = residual(H);
    if (r.cwiseAbs().maxCoeff() > target) {
      const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
      Matrix jac(n_unknowns, n_unknowns);
      std::vector<Vector> pert = H;
      for (int k = 0; k < n_unknowns; ++k) {
        const int stage = k / f.d;
        const int comp = k % f.d;
        const double delta = sqrt_eps * (1.0 + std::abs(H[static_cast<std::size_t>(stage)][comp]));
        pert[static_cast<std::size_t>(stage)][comp] += delta;
        jac.col(k) = (residual(pert) - r) / delta;
        pert[static_cast<std::size_t>(stage)][comp] = H[static_cast<std::size_t>(stage)][comp];
      }
      Eigen::PartialPivLU<Matrix> lu(jac);

      double norm = r.cwiseAbs().maxCoeff();
      for (int iter = 0; iter < 50; ++iter) {
        const Vector update = lu.solve(r);
        for (int i = 0; i < s; ++i) {
          H[static_cast<std::size_t>(i)] -= update.segment(i * f.d, f.d);
        }
        r = residual(H);
        if (!r.allFinite()) {
          throw NumericalError("Newton iteration produced non-finite stage values");
        }
        const double next = r.cwiseAbs().maxCoeff();
        if (next <= target || (next >= norm && next <= tol)) {
          norm = next;
          break; // converged, or stalled inside the acceptance band
        }
        norm = next;
      }
      if (norm > tol) {
        std::ostringstream msg;
        msg << "Newton did not converge after 50 iterations (residual " << norm
            << ", tolerance " << tol << ")";
        throw NumericalError(msg.str());
      }
    }
    for (int i = 0; i < s; ++i) {
      fill_phi(i);
    }
  }

  Vector v = base;
  for (int i = 0; i < s; ++i) {
    for (int m = 0; m <= M; ++m) {
      const double w = tc.z[static_cast<std::size_t>(m)][i];
      if (w != 0.0) {
        v += w * phi[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
      }
    }
  }

  EngineResult out;
  out.deltaL = std::move(deltaL);
  if (exponent_offset != nullptr) {
    out.out = std::move(v);
  } else {
    ExpPair step_exp;
    if (cache != nullptr && !f.noise_in_exponent) {
      step_exp = cache->get(f, c_total[0]);
    } else {
      step_exp = exponentiate(out.deltaL);
    }
    out.out = step_exp.identity ? std::move(v) : Vector(step_exp.forward * v);
  }
  return out;
}

void validate_scheme_for_sde(const SrkTableau& tab, const SemiLinearSde& sde) {
  if (!tab.coefficients) {
    throw std::invalid_argument("tableau has no coefficient generator");
  }
  if (tab.required_channels >= 0 && sde.channels() != tab.required_channels) {
    std::ostringstream msg;
    msg << tab.name << " is defined for M = " << tab.required_channels
        << " noise channels, problem has M = " << sde.channels();
    throw std::invalid_argument(msg.str());
  }
}

} // namespace

// ---------------------------------------------------------------------------
// LawsonStepper
// ---------------------------------------------------------------------------

struct LawsonStepper::Impl {
  SemiLinearSde sde;
  SchemeSpec spec;
  FoldedSde folded;
  ExpCache cache;
};

LawsonStepper::LawsonStepper(const SemiLinearSde& sde, SchemeSpec spec)
    : impl_(std::make_unique<Impl>()) {
  validate_scheme_for_sde(spec.tableau, sde);
  impl_->sde = sde;
  impl_->spec = std::move(spec);
  impl_->folded = fold_sde(impl_->sde, impl_->spec.mode);
  impl_->folded.sde = &impl_->sde;
}

LawsonStepper::~LawsonStepper() = default;

bool LawsonStepper::needs_dz() const { return impl_->spec.tableau.needs_dz; }

Vector LawsonStepper::step(double t, const Vector& y, const StepNoise& noise) {
  return engine_step(impl_->folded, impl_->spec.tableau, t, y, noise, &impl_->cache, nullptr).out;
}

Vector srk_lawson_step(const SemiLinearSde& sde, const SchemeSpec& spec, const Vector& y,
                       double t, const StepNoise& noise) {
  LawsonStepper stepper(sde, spec);
  return stepper.step(t, y, noise);
}

// ---------------------------------------------------------------------------
// Closed-form fast paths
// ---------------------------------------------------------------------------

Vector em_sl_step(const SemiLinearSde& sde, LawsonMode mode, const Vector& y, double t,
                  const StepNoise& noise) {
  const FoldedSde f = fold_sde(sde, mode);
  Vector v = y + noise.h * f.gtilde(0, t, y);
  for (int m = 1; m <= f.M; ++m) {
    v += noise.dW[m - 1] * f.gtilde(m, t, y);
  }
  Matrix dl = f.drift_base * noise.h;
  if (f.noise_in_exponent) {
    for (int m = 1; m <= f.M; ++m) {
      const Matrix& am = f.exp_noise[static_cast<std::size_t>(m - 1)];
      if (am.size() > 0) dl += noise.dW[m - 1] * am;
    }
  }
  const ExpPair e = exponentiate(dl);
  return e.identity ? v : Vector(e.forward * v);
}

Vector platen_sl_step(const SemiLinearSde& sde, LawsonMode mode, const Vector& y, double t,
                      const StepNoise& noise) {
  if (sde.channels() != 1) {
    throw std::invalid_argument("platen_sl_step is defined for a single noise channel");
  }
  const FoldedSde f = fold_sde(sde, mode);
  const double h = noise.h;
  const double sh = std::sqrt(h);
  const double dw = noise.dW[0];

  const Vector g0 = f.gtilde(0, t, y);
  const Vector g1 = f.gtilde(1, t, y);
  const Vector h2 = y + h * g0 + sh * g1;

  Matrix stage_exponent = f.drift_base * h;
  if (f.noise_in_exponent && f.exp_noise[0].size() > 0) {
    stage_exponent += sh * f.exp_noise[0];
  }
  const ExpPair e2 = exponentiate(stage_exponent);
  const Vector conj = conjugated_eval(f, e2, 1, t + h, h2);

  Vector v = y + h * g0 + dw * g1 + ((dw * dw - h) / (2.0 * sh)) * (conj - g1);

  Matrix dl = f.drift_base * h;
  if (f.noise_in_exponent && f.exp_noise[0].size() > 0) {
    dl += dw * f.exp_noise[0];
  }
  const ExpPair e = exponentiate(dl);
  return e.identity ? v : Vector(e.forward * v);
}

// ---------------------------------------------------------------------------
// Drift-implicit Platen comparator
// ---------------------------------------------------------------------------

struct ImplicitPlatenStepper::Impl {
  SemiLinearSde sde;
  bool linear_drift = false;
  double cached_h = std::numeric_limits<double>::quiet_NaN();
  Eigen::PartialPivLU<Matrix> cached_lu;

  Vector drift(double t, const Vector& x) const {
    Vector a = sde.A[0] * x;
    if (!sde.g_is_zero(0)) {
      a += sde.eval_g(0, t, x);
    }
    return a;
  }

  Vector diffusion(double t, const Vector& x) const {
    Vector b = sde.A[1] * x;
    if (!sde.g_is_zero(1)) {
      b += sde.eval_g(1, t, x);
    }
    return b;
  }
};

ImplicitPlatenStepper::ImplicitPlatenStepper(const SemiLinearSde& sde)
    : impl_(std::make_unique<Impl>()) {
  if (sde.channels() > 1) {
    throw std::invalid_argument("implicit Platen is defined for at most one noise channel");
  }
  impl_->sde = sde;
  impl_->linear_drift = sde.g_is_zero(0);
}

ImplicitPlatenStepper::~ImplicitPlatenStepper() = default;

Vector ImplicitPlatenStepper::step(double t, const Vector& y, const StepNoise& noise) {
  auto& im = *impl_;
  const double h = noise.h;
  const int d = im.sde.dim();

  const double t_next = t + h;
  Vector rhs = y;
  if (im.sde.channels() == 1) {
    const double dw = noise.dW[0];
    const double sh = std::sqrt(h);
    const Vector b_n = im.diffusion(t, y);
    const Vector support = y + h * im.drift(t, y) + sh * b_n;
    rhs += dw * b_n + ((dw * dw - h) / (2.0 * sh)) * (im.diffusion(t_next, support) - b_n);
  }
  if (im.linear_drift) {
    if (im.cached_h != h) {
      im.cached_lu.compute(Matrix::Identity(d, d) - h * im.sde.A[0]);
      if (im.cached_lu.rcond() < 1e-14) {
        throw NumericalError("implicit Platen: (I - h A_0) is numerically singular");
      }
      im.cached_h = h;
    }
    return im.cached_lu.solve(rhs);
  }

  // Modified Newton for F(x) = x - h a(t+h, x) - rhs, Jacobian at x = y.
  const double tol = 1e-12 * (1.0 + y.norm());
  const double target = 1e-14 * (1.0 + y.norm());
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  const auto F = [&](const Vector& x) { return Vector(x - h * im.drift(t_next, x) - rhs); };

  Vector x = y;
  Vector r = F(x);
  double norm = r.cwiseAbs().maxCoeff();
  if (norm <= target) {
    return x;
  }
  Matrix jac(d, d);
  for (int k = 0; k < d; ++k) {
    const double delta = sqrt_eps * (1.0 + std::abs(x[k]));
    Vector xp = x;
    xp[k] += delta;
    jac.col(k) = (F(xp) - r) / delta;
  }
  Eigen::PartialPivLU<Matrix> lu(jac);
  for (int iter = 0; iter < 50; ++iter) {
    x -= lu.solve(r);
    r = F(x);
    if (!r.allFinite()) {
      throw NumericalError("implicit Platen: Newton produced non-finite values");
    }
    const double next = r.cwiseAbs().maxCoeff();
    if (next <= target || (next >= norm && next <= tol)) {
      return x;
    }
    norm = next;
  }
  if (norm <= tol) {
    return x;
  }
  throw NumericalError("implicit Platen: Newton did not converge after 50 iterations");
}

Vector implicit_platen_step(const SemiLinearSde& sde, const Vector& y, double t, double h,
                            const Vector& dW) {
  ImplicitPlatenStepper stepper(sde);
  StepNoise noise;
  noise.h = h;
  noise.dW = dW;
  return stepper.step(t, y, noise);
}

// ---------------------------------------------------------------------------
// Integration drivers
// ---------------------------------------------------------------------------

namespace {

void validate_noise(const SemiLinearSde& sde, const IntegrationGrid& grid, const NoiseGrid& noise,
                    bool needs_dz) {
  if (noise.channels != sde.channels()) {
    throw std::invalid_argument("noise grid channel count does not match the SDE");
  }
  if (noise.steps != grid.steps) {
    throw std::invalid_argument("noise grid step count does not match the time grid");
  }
  const double h = grid.h();
  if (std::abs(noise.step_size - h) > 1e-9 * std::max(1.0, std::abs(h))) {
    throw std::invalid_argument("noise grid step size does not match the time grid");
  }
  if (needs_dz && !noise.dZ) {
    throw std::invalid_argument("scheme requires dZ but the noise grid does not carry it");
  }
  if (grid.x0.size() != sde.dim()) {
    throw std::invalid_argument("initial state dimension does not match the SDE");
  }
}

void check_state(const Vector& y, int step) {
  if (!y.allFinite() || y.norm() > kBlowUpThreshold) {
    throw DivergenceError("state norm passed the blow-up threshold", step);
  }
}

} // namespace

Trajectory integrate(const SemiLinearSde& sde, OneStepMethod& method,
                     const IntegrationGrid& grid, const NoiseGrid& noise) {
  validate_noise(sde, grid, noise, method.needs_dz());
  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(grid.steps) + 1);
  traj.states.reserve(static_cast<std::size_t>(grid.steps) + 1);
  traj.times.push_back(grid.t0);
  traj.states.push_back(grid.x0);

  const double h = grid.h();
  Vector y = grid.x0;
  for (int n = 0; n < grid.steps; ++n) {
    const double t = grid.t0 + n * h;
    try {
      y = method.step(t, y, at_step(noise, n));
    } catch (const NumericalError& err) {
      throw NumericalError(std::string(err.what()) + " at step " + std::to_string(n));
    }
    check_state(y, n);
    traj.times.push_back(grid.t0 + (n + 1) * h);
    traj.states.push_back(y);
  }
  return traj;
}

Trajectory integrate(const SemiLinearSde& sde, const SchemeSpec& spec,
                     const IntegrationGrid& grid, const NoiseGrid& noise) {
  LawsonStepper stepper(sde, spec);
  return integrate(sde, stepper, grid, noise);
}

Vector integrate_final(const SemiLinearSde& sde, OneStepMethod& method,
                       const IntegrationGrid& grid, const NoiseGrid& noise) {
  validate_noise(sde, grid, noise, method.needs_dz());
  const double h = grid.h();
  Vector y = grid.x0;
  for (int n = 0; n < grid.steps; ++n) {
    const double t = grid.t0 + n * h;
    try {
      y = method.step(t, y, at_step(noise, n));
    } catch (const NumericalError& err) {
      throw NumericalError(std::string(err.what()) + " at step " + std::to_string(n));
    }
    check_state(y, n);
  }
  return y;
}

Trajectory integrate_global(const SemiLinearSde& sde, const SchemeSpec& spec,
                            const IntegrationGrid& grid, const NoiseGrid& noise) {
  validate_scheme_for_sde(spec.tableau, sde);
  validate_noise(sde, grid, noise, spec.tableau.needs_dz);

  const FoldedSde folded = fold_sde(sde, spec.mode);
  const int d = sde.dim();
  Matrix lbar = Matrix::Zero(d, d);
  Vector v = grid.x0;

  Trajectory traj;
  traj.times.push_back(grid.t0);
  traj.states.push_back(grid.x0);
  const double h = grid.h();
  for (int n = 0; n < grid.steps; ++n) {
    const double t = grid.t0 + n * h;
    EngineResult res;
    try {
      res = engine_step(folded, spec.tableau, t, v, at_step(noise, n), nullptr, &lbar);
    } catch (const NumericalError& err) {
      throw NumericalError(std::string(err.what()) + " at step " + std::to_string(n));
    }
    v = std::move(res.out);
    lbar += res.deltaL;
    const ExpPair map_back = exponentiate(lbar);
    Vector y = map_back.identity ? v : Vector(map_back.forward * v);
    check_state(y, n);
    traj.times.push_back(grid.t0 + (n + 1) * h);
    traj.states.push_back(std::move(y));
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

namespace {

SrkTableau tableau_by_name(const std::string& name) {
  if (name == "em") return tableau_euler_maruyama();
  if (name == "platen") return tableau_platen();
  if (name == "midpoint") return tableau_midpoint();
  if (name == "platen15") return tableau_platen_strong_15();
  if (name == "platen-weak2") return tableau_platen_weak_2();
  throw std::invalid_argument("unknown tableau: " + name);
}

const std::vector<std::string>& tableau_names() {
  static const std::vector<std::string> names = {"em", "platen", "midpoint", "platen15",
                                                 "platen-weak2"};
  return names;
}

} // namespace

RegisteredScheme parse_scheme(const std::string& id) {
  if (id == "implicit-platen") {
    RegisteredScheme s;
    s.id = id;
    s.is_implicit_platen = true;
    s.strong_order = 1.0;
    s.required_channels = -1; // 0 or 1; checked at construction
    return s;
  }

  std::string base = id;
  LawsonMode mode = LawsonMode::Raw;
  const auto strip = [&](const std::string& suffix, LawsonMode m) {
    if (base.size() > suffix.size() && base.ends_with(suffix)) {
      const std::string candidate = base.substr(0, base.size() - suffix.size());
      for (const auto& name : tableau_names()) {
        if (candidate == name) {
          base = candidate;
          mode = m;
          return true;
        }
      }
    }
    return false;
  };
  if (!strip("-dsl", LawsonMode::Dsl) && !strip("-fsl", LawsonMode::Fsl)) {
    strip("-raw", LawsonMode::Raw);
  }

  for (const auto& name : tableau_names()) {
    if (base == name) {
      RegisteredScheme s;
      s.id = id;
      SrkTableau tab = tableau_by_name(name);
      s.strong_order = tab.strong_order;
      s.native_calculus = tab.native_calculus;
      s.needs_dz = tab.needs_dz;
      s.required_channels = tab.required_channels;
      s.spec = SchemeSpec{std::move(tab), mode};
      return s;
    }
  }
  throw std::invalid_argument("unknown scheme: " + id);
}

std::vector<std::string> known_schemes() {
  std::vector<std::string> out;
  for (const auto& name : tableau_names()) {
    out.push_back(name);
    out.push_back(name + "-dsl");
    out.push_back(name + "-fsl");
  }
  out.push_back("implicit-platen");
  return out;
}

std::unique_ptr<OneStepMethod> make_method(const SemiLinearSde& sde, const RegisteredScheme& scheme) {
  if (scheme.is_implicit_platen) {
    return std::make_unique<ImplicitPlatenStepper>(sde);
  }
  return std::make_unique<LawsonStepper>(sde, *scheme.spec);
}

} // namespace sdelawson
