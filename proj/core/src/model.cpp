// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#include "sdelawson/model.hpp"

#include <sstream>
#include <stdexcept>

namespace sdelawson {

double gamma_star(Interpretation interp) {
  return interp == Interpretation::Ito ? 0.5 : 0.0;
}

Vector SemiLinearSde::eval_g(int m, double t, const Vector& x) const {
  const auto& fn = g[static_cast<std::size_t>(m)];
  if (!fn) {
    return Vector::Zero(dim());
  }
  Vector out = fn(t, x);
  if (out.size() != dim()) {
    std::ostringstream msg;
    msg << "g_" << m << " returned a vector of length " << out.size() << ", expected " << dim();
    throw std::invalid_argument(msg.str());
  }
  return out;
}

bool SemiLinearSde::all_g_zero() const {
  for (const auto& fn : g) {
    if (fn) return false;
  }
  return true;
}

SemiLinearSde make_semilinear_sde(Interpretation interpretation,
                                  std::vector<Matrix> linear_parts,
                                  std::vector<StateFunction> remainders,
                                  std::vector<JacobianFunction> remainder_jacobians,
                                  double commute_tol) {
  if (linear_parts.empty()) {
    throw std::invalid_argument("SDE needs at least the drift matrix A_0");
  }
  const Eigen::Index d = linear_parts.front().rows();
  if (d < 1) {
    throw std::invalid_argument("SDE dimension must be positive");
  }
  for (std::size_t m = 0; m < linear_parts.size(); ++m) {
    const Matrix& a = linear_parts[m];
    if (a.rows() != d || a.cols() != d) {
      throw std::invalid_argument("all A_m must be d x d with a common d");
    }
    if (!a.allFinite()) {
      throw std::invalid_argument("A_" + std::to_string(m) + " has non-finite entries");
    }
  }
  const CommutativityReport report = validate_commutativity(linear_parts, commute_tol);
  if (!report.ok) {
    std::ostringstream msg;
    msg << "linear parts A_" << report.l << " and A_" << report.k
        << " do not commute (commutator max-norm " << report.commutator_norm << ")";
    throw std::invalid_argument(msg.str());
  }
  if (remainders.size() != linear_parts.size()) {
    throw std::invalid_argument("need exactly one remainder g_m per linear part A_m");
  }
  if (remainder_jacobians.empty()) {
    remainder_jacobians.resize(linear_parts.size());
  }
  if (remainder_jacobians.size() != linear_parts.size()) {
    throw std::invalid_argument("remainder Jacobian list must match the channel count");
  }

  SemiLinearSde sde;
  sde.interpretation = interpretation;
  sde.A = std::move(linear_parts);
  sde.g = std::move(remainders);
  sde.g_jacobian = std::move(remainder_jacobians);
  return sde;
}

IntegrationGrid make_grid(double t0, double T, int steps, Vector x0) {
  if (!(t0 < T)) {
    throw std::invalid_argument("grid requires t0 < T");
  }
  if (steps < 1) {
    throw std::invalid_argument("grid requires at least one step");
  }
  if (!x0.allFinite() || x0.size() == 0) {
    throw std::invalid_argument("initial state must be non-empty and finite");
  }
  return IntegrationGrid{t0, T, steps, std::move(x0)};
}

Vector g_tilde(const SemiLinearSde& sde, int m, double t, const Vector& x) {
  if (m < 0 || m > sde.channels()) {
    throw std::invalid_argument("g_tilde: channel index out of range");
  }
  if (m > 0) {
    return sde.eval_g(m, t, x);
  }
  Vector out = sde.eval_g(0, t, x);
  const double two_gamma = 2.0 * gamma_star(sde.interpretation);
  if (two_gamma != 0.0) {
    for (int ch = 1; ch <= sde.channels(); ++ch) {
      if (!sde.g_is_zero(ch)) {
        out -= two_gamma * (sde.A[static_cast<std::size_t>(ch)] * sde.eval_g(ch, t, x));
      }
    }
  }
  return out;
}

Matrix delta_L_stage(const SemiLinearSde& sde, double c0, const Vector& cm) {
  if (cm.size() != sde.channels()) {
    throw std::invalid_argument("delta_L: offset vector must have one entry per noise channel");
  }
  const double gamma = gamma_star(sde.interpretation);
  Matrix out = sde.A[0] * c0;
  for (int m = 1; m <= sde.channels(); ++m) {
    const Matrix& am = sde.A[static_cast<std::size_t>(m)];
    if (gamma != 0.0) {
      out -= (gamma * c0) * (am * am);
    }
    out += cm[m - 1] * am;
  }
  return out;
}

Matrix delta_L(const SemiLinearSde& sde, double h, const Vector& dW) {
  return delta_L_stage(sde, h, dW);
}

Vector exact_linear_solution(const SemiLinearSde& sde, double t0, double t,
                             const Vector& x0, const Vector& wiener_increment) {
  if (!sde.all_g_zero()) {
    throw std::invalid_argument("exact_linear_solution: SDE has nonzero remainders g_m");
  }
  if (x0.size() != sde.dim()) {
    throw std::invalid_argument("exact_linear_solution: initial state has wrong dimension");
  }
  return linalg::expm(delta_L_stage(sde, t - t0, wiener_increment)) * x0;
}

CommutativityReport validate_commutativity(const std::vector<Matrix>& mats, double tol) {
  CommutativityReport report;
  for (std::size_t l = 0; l + 1 < mats.size(); ++l) {
    for (std::size_t k = l + 1; k < mats.size(); ++k) {
      if (!linalg::is_commuting(mats[l], mats[k], tol)) {
        report.ok = false;
        report.l = static_cast<int>(l);
        report.k = static_cast<int>(k);
        report.commutator_norm = linalg::commutator(mats[l], mats[k]).cwiseAbs().maxCoeff();
        return report;
      }
    }
  }
  return report;
}

std::pair<Matrix, Matrix> split_commuting(const Matrix& A0_full, const Matrix& A1) {
  if (A0_full.rows() != A1.rows() || A0_full.cols() != A1.cols()) {
    throw std::invalid_argument("split_commuting: matrices must have equal dimensions");
  }
  const double denom = A1.squaredNorm();
  const double c = denom == 0.0 ? 0.0 : A0_full.cwiseProduct(A1).sum() / denom;
  Matrix a0 = c * A1;
  Matrix residual = A0_full - a0;
  return {std::move(a0), std::move(residual)};
}

namespace {

JacobianFunction remainder_jacobian_or_throw(const SemiLinearSde& sde, int m) {
  if (sde.g_is_zero(m)) {
    const int d = sde.dim();
    return [d](double, const Vector&) { return Matrix::Zero(d, d); };
  }
  const auto& jac = sde.g_jacobian[static_cast<std::size_t>(m)];
  if (!jac) {
    throw std::invalid_argument(
        "calculus conversion needs the Jacobian of g_" + std::to_string(m) +
        " (declare it via constant_jacobian or a callback)");
  }
  return jac;
}

// sign = -1: Ito -> Stratonovich, sign = +1: Stratonovich -> Ito.
SemiLinearSde convert(const SemiLinearSde& sde, double sign, Interpretation target) {
  const int d = sde.dim();
  const int M = sde.channels();

  // Pure-linear part of the correction, folded into A_0.
  Matrix a0 = sde.A[0];
  for (int m = 1; m <= M; ++m) {
    const Matrix& am = sde.A[static_cast<std::size_t>(m)];
    a0 += (sign * 0.5) * (am * am);
  }

  // Cross terms A_m g_m + dg_m (A_m x + g_m) survive only on channels with
  // a nonzero remainder; those need Jacobian information.
  std::vector<JacobianFunction> jacobians(static_cast<std::size_t>(M) + 1);
  bool has_nonlinear_correction = false;
  for (int m = 1; m <= M; ++m) {
    if (!sde.g_is_zero(m)) {
      has_nonlinear_correction = true;
      jacobians[static_cast<std::size_t>(m)] = remainder_jacobian_or_throw(sde, m);
    }
  }

  StateFunction g0 = sde.g[0];
  if (has_nonlinear_correction) {
    SemiLinearSde source = sde; // immutable copy captured by the new drift
    std::vector<JacobianFunction> jac = jacobians;
    g0 = [source, jac, sign, d](double t, const Vector& x) {
      Vector out = source.g[0] ? source.g[0](t, x) : Vector::Zero(d);
      for (int m = 1; m <= source.channels(); ++m) {
        if (source.g_is_zero(m)) continue;
        const Matrix& am = source.A[static_cast<std::size_t>(m)];
        const Vector gm = source.eval_g(m, t, x);
        const Matrix dgm = jac[static_cast<std::size_t>(m)](t, x);
        // (A_m + dg_m)(A_m x + g_m) minus the A_m^2 x part already in A_0.
        out += (sign * 0.5) * (am * gm + dgm * (am * x + gm));
      }
      return out;
    };
  }

  std::vector<Matrix> linear = sde.A;
  linear[0] = std::move(a0);
  std::vector<StateFunction> remainders = sde.g;
  remainders[0] = std::move(g0);
  return make_semilinear_sde(target, std::move(linear), std::move(remainders), sde.g_jacobian);
}

} // namespace

SemiLinearSde ito_from_stratonovich(const SemiLinearSde& sde) {
  if (sde.interpretation == Interpretation::Ito) {
    return sde;
  }
  return convert(sde, +1.0, Interpretation::Ito);
}

SemiLinearSde stratonovich_from_ito(const SemiLinearSde& sde) {
  if (sde.interpretation == Interpretation::Stratonovich) {
    return sde;
  }
  return convert(sde, -1.0, Interpretation::Stratonovich);
}

StateFunction affine_remainder(const Matrix& linear) {
  return [linear](double, const Vector& x) { return Vector(linear * x); };
}

StateFunction affine_remainder(const Matrix& linear, const Vector& constant) {
  return [linear, constant](double, const Vector& x) { return Vector(linear * x + constant); };
}

JacobianFunction constant_jacobian(const Matrix& linear) {
  return [linear](double, const Vector&) { return linear; };
}

} // namespace sdelawson
