// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#include "sdelawson/stability.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "sdelawson/parallel.hpp"

namespace sdelawson::stability {

namespace {

double norm_sq(Complex c) { return std::norm(c); }

Matrix rotation_generator() {
  Matrix j(2, 2);
  j << 0.0, 1.0, -1.0, 0.0;
  return j;
}

double max_real_eigenvalue(const Matrix& a) {
  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("stability: eigensolver did not converge");
  }
  return solver.eigenvalues().real().maxCoeff();
}

} // namespace

double R_em_dsl(double z, Complex u, double v) {
  if (v < 0.0) {
    throw std::invalid_argument("R_em_dsl: v = sqrt(h)|mu| must be nonnegative");
  }
  return std::exp(2.0 * z) * (norm_sq(1.0 + u) + v * v);
}

double R_platen_dsl(double z, Complex u, Complex v) {
  return std::exp(2.0 * z) *
         (norm_sq(1.0 + u) + norm_sq(v) * (1.0 + 0.5 * norm_sq(u + v)));
}

bool exact_ms_stable(Complex lambda, Complex sigma, Complex mu) {
  return 2.0 * (lambda + sigma).real() + norm_sq(mu) < 0.0;
}

bool sufficient_em_dsl(Complex lambda, Complex sigma, Complex mu) {
  return exact_ms_stable(lambda, sigma, mu) && std::abs(sigma) <= -lambda.real();
}

bool sufficient_platen_dsl(Complex lambda, Complex sigma, Complex mu) {
  const double re = lambda.real();
  return exact_ms_stable(lambda, sigma, mu) &&
         norm_sq(sigma) + 0.5 * norm_sq(mu) * norm_sq(mu) <= 2.0 * re * re &&
         (sigma * std::conj(mu)).real() <= 0.0 &&
         norm_sq(mu) * norm_sq(sigma) <= -(8.0 / 3.0) * re * re * re;
}

Matrix sde_stability_matrix(const Matrix& A0, const std::vector<Matrix>& Bs) {
  const Eigen::Index d = A0.rows();
  if (A0.cols() != d) {
    throw std::invalid_argument("sde_stability_matrix: A0 must be square");
  }
  const Matrix id = Matrix::Identity(d, d);
  Matrix s = linalg::kron(id, A0) + linalg::kron(A0, id);
  for (const Matrix& b : Bs) {
    if (b.rows() != d || b.cols() != d) {
      throw std::invalid_argument("sde_stability_matrix: B_m dimensions must match A0");
    }
    s += linalg::kron(b, b);
  }
  return s;
}

bool sde_ms_stable(const Matrix& A0, const std::vector<Matrix>& Bs) {
  return max_real_eigenvalue(sde_stability_matrix(A0, Bs)) < 0.0;
}

Matrix scheme_stability_matrix(SchemeKind kind, const Matrix& Abar,
                               const std::vector<Matrix>& Bbars) {
  const Eigen::Index d = Abar.rows();
  if (Abar.cols() != d) {
    throw std::invalid_argument("scheme_stability_matrix: Abar must be square");
  }
  for (const Matrix& b : Bbars) {
    if (b.rows() != d || b.cols() != d) {
      throw std::invalid_argument("scheme_stability_matrix: Bbar dimensions must match Abar");
    }
  }
  const Matrix id = Matrix::Identity(d, d);
  const Matrix id2 = Matrix::Identity(d * d, d * d);

  switch (kind) {
    case SchemeKind::EmDsl: {
      const Matrix e = linalg::expm(Abar);
      Matrix inner = id2;
      for (const Matrix& b : Bbars) {
        inner += linalg::kron(b, b);
      }
      return linalg::kron(e, e) * inner;
    }
    case SchemeKind::PlatenDsl: {
      if (Bbars.size() != 1) {
        throw std::invalid_argument("Platen stability matrix needs a single noise channel");
      }
      const Matrix& b = Bbars.front();
      const Matrix e = linalg::expm(Abar);
      const Matrix em = linalg::expm(Matrix(-Abar));
      const Matrix c = em * b * e * (id + b) - b;
      return linalg::kron(e, e) * (id2 + linalg::kron(b, b) + 0.5 * linalg::kron(c, c));
    }
    case SchemeKind::ImplicitPlatenPrinted: {
      if (Bbars.size() != 1) {
        throw std::invalid_argument("Platen stability matrix needs a single noise channel");
      }
      const Matrix& b = Bbars.front();
      const Matrix bb = b * b;
      return linalg::kron(Matrix(id + Abar), Matrix(id + Abar)) + linalg::kron(b, b) +
             linalg::kron(bb, bb);
    }
    case SchemeKind::ImplicitPlatenDerived: {
      if (Bbars.size() != 1) {
        throw std::invalid_argument("Platen stability matrix needs a single noise channel");
      }
      const Matrix& b = Bbars.front();
      Eigen::PartialPivLU<Matrix> lu(Matrix(id - Abar));
      if (lu.rcond() < 1e-14) {
        throw std::runtime_error("implicit Platen stability matrix: (I - Abar) is singular");
      }
      const Matrix m = lu.solve(id);
      const Matrix corr = b * (Abar + b);
      return linalg::kron(m, m) *
             (id2 + linalg::kron(b, b) + 0.5 * linalg::kron(corr, corr));
    }
  }
  throw std::invalid_argument("scheme_stability_matrix: unknown kind");
}

Matrix exact_second_moment(const Matrix& S_sde, const Matrix& P0, double t) {
  if (P0.rows() != P0.cols() || P0.rows() * P0.rows() != S_sde.rows()) {
    throw std::invalid_argument("exact_second_moment: P0 must be d x d with S of size d^2");
  }
  const Vector propagated = linalg::expm(Matrix(S_sde * t)) * linalg::vec(P0);
  Matrix p = linalg::unvec(propagated, P0.rows());
  return 0.5 * (p + p.transpose());
}

Vector scheme_moment_step(const Matrix& S_scheme, const Vector& vec_moment) {
  if (S_scheme.cols() != vec_moment.size()) {
    throw std::invalid_argument("scheme_moment_step: dimension mismatch");
  }
  return S_scheme * vec_moment;
}

Matrix RegionProblem::Abar(double lambda_h) const {
  Matrix a(2, 2);
  if (kind == Kind::OrthogonalNoise) {
    a << lambda_h, bh, 0.0, lambda_h;
  } else {
    a << lambda_h, omega2h, -omega2h, lambda_h;
  }
  return a;
}

Matrix RegionProblem::Bbar(double sigma2_h) const {
  if (sigma2_h < 0.0) {
    throw std::invalid_argument("sigma^2 h must be nonnegative");
  }
  return std::sqrt(sigma2_h) * rotation_generator();
}

namespace {

SchemeKind scheme_kind_of(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::EmDsl: return SchemeKind::EmDsl;
    case BoundaryKind::PlatenDsl: return SchemeKind::PlatenDsl;
    case BoundaryKind::ImplicitPlatenPrinted: return SchemeKind::ImplicitPlatenPrinted;
    case BoundaryKind::ImplicitPlatenDerived: return SchemeKind::ImplicitPlatenDerived;
    case BoundaryKind::Exact: break;
  }
  throw std::invalid_argument("not a scheme boundary kind");
}

} // namespace

double point_rho(const RegionProblem& problem, BoundaryKind kind, double lambda_h,
                 double sigma2_h) {
  const Matrix abar = problem.Abar(lambda_h);
  const Matrix bbar = problem.Bbar(sigma2_h);
  if (kind == BoundaryKind::Exact) {
    // Asymptotic per-step factor of the exact second moment; for the skew
    // noise problems at b = 0 this is e^{2 lambda h + sigma^2 h}.
    return std::exp(max_real_eigenvalue(sde_stability_matrix(abar, {bbar})));
  }
  return linalg::spectral_radius(scheme_stability_matrix(scheme_kind_of(kind), abar, {bbar}));
}

namespace {

RegionColumn scan_column(const RegionProblem& problem, BoundaryKind kind,
                         const RegionScanSpec& spec, double lambda_h) {
  // Indicator: positive when unstable at (lambda_h, sigma2_h).
  const auto margin = [&](double sigma2_h) {
    return point_rho(problem, kind, lambda_h, sigma2_h) - 1.0;
  };

  RegionColumn column;
  column.lambda_h = lambda_h;

  double prev_s = 0.0;
  double prev_m = margin(0.0);
  if (prev_m > 0.0) {
    column.status = ColumnStatus::UnstableAtZero;
    return column;
  }

  bool bracketed = false;
  double lo = 0.0, hi = 0.0;
  bool sign_changed_back = false;
  for (int k = 1; k < spec.scan_samples; ++k) {
    const double s = spec.sigma2_max * k / (spec.scan_samples - 1);
    const double m = margin(s);
    if (!bracketed && prev_m <= 0.0 && m > 0.0) {
      bracketed = true;
      lo = prev_s;
      hi = s;
    } else if (bracketed && m <= 0.0) {
      sign_changed_back = true; // non-monotone: the scanned slice re-enters
    }
    prev_s = s;
    prev_m = m;
  }

  if (!bracketed) {
    column.status = ColumnStatus::Unbounded;
    return column;
  }
  column.status = sign_changed_back ? ColumnStatus::BracketFailure : ColumnStatus::Boundary;
  while (hi - lo > spec.bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    if (margin(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  column.sigma2_h = 0.5 * (lo + hi);
  return column;
}

} // namespace

std::vector<RegionColumn> region_scan(const RegionProblem& problem, BoundaryKind kind,
                                      const RegionScanSpec& spec, int workers) {
  if (spec.columns < 1 || spec.scan_samples < 2 || !(spec.sigma2_max > 0.0)) {
    throw std::invalid_argument("region_scan: invalid scan specification");
  }
  std::vector<RegionColumn> out(static_cast<std::size_t>(spec.columns));
  parallel_chunks(spec.columns, 8, workers, [&](std::int64_t begin, std::int64_t end, std::int64_t) {
    for (std::int64_t col = begin; col < end; ++col) {
      const double lambda_h =
          spec.columns == 1
              ? spec.lambda_min
              : spec.lambda_min +
                    (spec.lambda_max - spec.lambda_min) * col / (spec.columns - 1);
      out[static_cast<std::size_t>(col)] = scan_column(problem, kind, spec, lambda_h);
    }
  });
  return out;
}

} // namespace sdelawson::stability
