// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "sdelawson/linalg.hpp"

namespace sdelawson {

enum class Interpretation { Ito, Stratonovich };

/// 1/2 for Ito, 0 for Stratonovich: the drift correction that makes the
/// commuting linear flow a single matrix exponential.
double gamma_star(Interpretation interp);

using StateFunction = std::function<Vector(double t, const Vector& x)>;
using JacobianFunction = std::function<Matrix(double t, const Vector& x)>;

/// Semi-linear SDE  dX = sum_m (A_m X + g_m(t, X)) * dW_m,  W_0(t) = t.
///
/// The linear parts A_0..A_M must commute pairwise (checked at
/// construction); the remainders g_m are arbitrary callables. An empty
/// StateFunction means g_m == 0, an empty JacobianFunction means the
/// Jacobian of g_m is unavailable (zero when g_m is empty).
///
/// Instances are immutable after construction and safe to share across
/// workers; the g_m callables are required to be re-entrant.
struct SemiLinearSde {
  Interpretation interpretation = Interpretation::Ito;
  std::vector<Matrix> A;                 // size M+1, each d x d
  std::vector<StateFunction> g;          // size M+1
  std::vector<JacobianFunction> g_jacobian; // size M+1

  int dim() const { return static_cast<int>(A.empty() ? 0 : A.front().rows()); }
  int channels() const { return static_cast<int>(A.size()) - 1; }

  Vector eval_g(int m, double t, const Vector& x) const;
  bool g_is_zero(int m) const { return !g[static_cast<std::size_t>(m)]; }
  bool all_g_zero() const;
};

/// Validating factory. Throws std::invalid_argument when shapes are bad,
/// entries are non-finite, or the A_m fail the pairwise commutativity check.
SemiLinearSde make_semilinear_sde(Interpretation interpretation,
                                  std::vector<Matrix> linear_parts,
                                  std::vector<StateFunction> remainders,
                                  std::vector<JacobianFunction> remainder_jacobians = {},
                                  double commute_tol = 1e-12);

/// Equidistant time grid with the initial state.
struct IntegrationGrid {
  double t0 = 0.0;
  double T = 1.0;
  int steps = 1;
  Vector x0;

  double h() const { return (T - t0) / steps; }
};

IntegrationGrid make_grid(double t0, double T, int steps, Vector x0);

/// The corrected remainders of the transformed equation:
///   m = 0: g_0 - 2 gamma* sum_{m>=1} A_m g_m,   m > 0: g_m.
Vector g_tilde(const SemiLinearSde& sde, int m, double t, const Vector& x);

/// Step exponent  (A_0 - gamma* sum A_m^2) h + sum_m A_m dW_m.
Matrix delta_L(const SemiLinearSde& sde, double h, const Vector& dW);

/// Stage-offset exponent  (A_0 - gamma* sum A_m^2) c0 + sum_m A_m c_m.
Matrix delta_L_stage(const SemiLinearSde& sde, double c0, const Vector& cm);

/// Exact flow of the purely linear equation (all g == 0):
///   x(t) = exp[(A_0 - gamma* sum A_m^2)(t - t0) + sum A_m W_m] x0,
/// with W_m = W_m(t) - W_m(t0). Throws std::invalid_argument when a
/// remainder is present.
Vector exact_linear_solution(const SemiLinearSde& sde, double t0, double t,
                             const Vector& x0, const Vector& wiener_increment);

struct CommutativityReport {
  bool ok = true;
  int l = -1;
  int k = -1;
  double commutator_norm = 0.0;
};

/// Checks all pairs; on violation names the offending pair and the
/// max-norm of its commutator.
CommutativityReport validate_commutativity(const std::vector<Matrix>& mats, double tol = 1e-12);

/// Frobenius projection of A0_full onto span(A1): A0 = c A1 with
/// c = <A0_full, A1>_F / <A1, A1>_F (c = 0 when A1 == 0). The returned
/// pair (A0, residual) satisfies [A0, A1] = 0 by construction and
/// A0 + residual = A0_full exactly.
std::pair<Matrix, Matrix> split_commuting(const Matrix& A0_full, const Matrix& A1);

/// Calculus conversions. The half-sum correction
///   -+ 1/2 sum_{m>=1} (A_m + dg_m)(A_m x + g_m)
/// moves between the drifts; its pure-linear part -+ 1/2 sum A_m^2 is folded
/// into A_0 (keeping commutativity), the rest into g_0. Requires a Jacobian
/// for every channel with a nonzero remainder.
SemiLinearSde ito_from_stratonovich(const SemiLinearSde& sde);
SemiLinearSde stratonovich_from_ito(const SemiLinearSde& sde);

/// Convenience builders for affine remainders g(t,x) = G x (+ c).
StateFunction affine_remainder(const Matrix& linear);
StateFunction affine_remainder(const Matrix& linear, const Vector& constant);
JacobianFunction constant_jacobian(const Matrix& linear);

} // namespace sdelawson
