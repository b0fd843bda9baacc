// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "sdelawson/linalg.hpp"

namespace sdelawson::stability {

using Complex = std::complex<double>;

/// Scalar mean-square stability functions for the linear test equation
///   dX = (lambda + sigma) X dt + mu X dW
/// with the exponential handling lambda. Arguments are the step-scaled
/// quantities z = h Re(lambda), u = h sigma, v = sqrt(h) mu (the
/// Euler-Maruyama function depends on |mu| only, so takes v >= 0 real).
double R_em_dsl(double z, Complex u, double v);
double R_platen_dsl(double z, Complex u, Complex v);

/// Exact solution: mean-square stable iff 2 Re(lambda + sigma) + |mu|^2 < 0.
bool exact_ms_stable(Complex lambda, Complex sigma, Complex mu);

/// Sufficient conditions for h-independent mean-square stability of the
/// drift-exponential schemes (each conjoined with exact_ms_stable).
bool sufficient_em_dsl(Complex lambda, Complex sigma, Complex mu);
bool sufficient_platen_dsl(Complex lambda, Complex sigma, Complex mu);

/// Mean-square stability matrix of dX = A0 X dt + sum_m B_m X dW_m:
///   S = I (x) A0 + A0 (x) I + sum_m B_m (x) B_m,
/// propagating vec(E[X X^T]) (column-major vec). The zero solution is
/// stable iff every eigenvalue of S has negative real part.
Matrix sde_stability_matrix(const Matrix& A0, const std::vector<Matrix>& Bs);
bool sde_ms_stable(const Matrix& A0, const std::vector<Matrix>& Bs);

enum class SchemeKind {
  EmDsl,
  PlatenDsl,
  ImplicitPlatenPrinted,
  ImplicitPlatenDerived,
};

/// Per-step second-moment propagator of the scheme, in the step-scaled
/// variables Abar = h A0, Bbar_m = sqrt(h) B_m. The scheme is mean-square
/// stable iff the spectral radius is below 1.
///
/// EmDsl:      e^A (x) e^A (I + sum B (x) B)
/// PlatenDsl:  e^A (x) e^A (I + B (x) B + 1/2 C (x) C),
///             C = e^-A B e^A (I + B) - B   (single channel)
/// ImplicitPlatenPrinted: (I+A) (x) (I+A) + B (x) B + B^2 (x) B^2, the
///             commonly printed closed form (kept verbatim as a reference
///             variant; it is not the exact propagator of any of the
///             simulated schemes).
/// ImplicitPlatenDerived: exact propagator of the drift-implicit Platen
///             step, M (x) M (I + B (x) B + 1/2 (B(A+B)) (x) (B(A+B))),
///             M = (I-A)^-1.
Matrix scheme_stability_matrix(SchemeKind kind, const Matrix& Abar,
                               const std::vector<Matrix>& Bbars);

/// Exact second moment P(t) = E[X X^T] of the linear SDE with stability
/// matrix S: vec P(t) = e^{S t} vec P0. The output is symmetrized.
Matrix exact_second_moment(const Matrix& S_sde, const Matrix& P0, double t);

/// One application of the scheme propagator to a vectorized moment matrix.
Vector scheme_moment_step(const Matrix& S_scheme, const Vector& vec_moment);

/// Test problems for the region scans, parameterized in the step-scaled
/// plane (lambda h, sigma^2 h) at fixed bh resp. omega^2 h.
struct RegionProblem {
  enum class Kind { OrthogonalNoise, Oscillator } kind = Kind::OrthogonalNoise;
  double bh = 0.0;      // orthogonal noise shear
  double omega2h = 0.0; // oscillator frequency

  Matrix Abar(double lambda_h) const;
  Matrix Bbar(double sigma2_h) const;
};

enum class BoundaryKind {
  EmDsl,
  PlatenDsl,
  ImplicitPlatenPrinted,
  ImplicitPlatenDerived,
  Exact,
};

enum class ColumnStatus {
  Boundary,       // crossing found and bisected
  Unbounded,      // stable on the whole scanned range
  UnstableAtZero, // already unstable at sigma^2 h = 0
  BracketFailure, // scan saw a non-monotone sign pattern
};

struct RegionColumn {
  double lambda_h = 0.0;
  ColumnStatus status = ColumnStatus::Unbounded;
  double sigma2_h = 0.0; // boundary value when status == Boundary
};

struct RegionScanSpec {
  double lambda_min = -3.0;
  double lambda_max = 0.0;
  int columns = 600;
  double sigma2_max = 8.0;
  int scan_samples = 64;
  double bisect_tol = 1e-6;
};

/// For each lambda_h column, the sigma^2 h where the scheme's rho(S)
/// crosses 1 (or the exact solution's max Re eig(S) crosses 0), bracketed
/// by an upward scan and bisected to spec.bisect_tol. Columns are
/// independent and computed on `workers` threads.
std::vector<RegionColumn> region_scan(const RegionProblem& problem, BoundaryKind kind,
                                      const RegionScanSpec& spec, int workers = 1);

/// rho(scheme matrix) resp. the exact per-step moment factor e^{2 lambda h + sigma^2 h}
/// used by the point classification (the skew diffusion makes the exact
/// norm dynamics deterministic for both region problems at b = 0).
double point_rho(const RegionProblem& problem, BoundaryKind kind, double lambda_h,
                 double sigma2_h);

} // namespace sdelawson::stability
