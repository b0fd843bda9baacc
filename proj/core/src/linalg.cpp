// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#include "sdelawson/linalg.hpp"

#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace sdelawson::linalg {

bool all_finite(const Matrix& a) { return a.allFinite(); }

namespace {

void require_square_finite(const Matrix& a, const char* op) {
  if (a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << op << ": matrix must be square, got " << a.rows() << "x" << a.cols();
    throw std::invalid_argument(msg.str());
  }
  if (!a.allFinite()) {
    throw std::invalid_argument(std::string(op) + ": matrix has non-finite entries");
  }
}

} // namespace

Matrix expm(const Matrix& a) {
  require_square_finite(a, "expm");
  if (a.isZero(0.0)) {
    return Matrix::Identity(a.rows(), a.cols());
  }
  // Eigen's scaling-and-squaring with degree-13 Pade core.
  return a.exp();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double spectral_radius(const Matrix& a) {
  require_square_finite(a, "spectral_radius");
  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("spectral_radius: eigensolver did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix commutator(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw std::invalid_argument("commutator: matrices must be square with equal dimensions");
  }
  return a * b - b * a;
}

bool is_commuting(const Matrix& a, const Matrix& b, double tol) {
  const double scale = 1.0 + a.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff();
  return commutator(a, b).cwiseAbs().maxCoeff() <= tol * scale;
}

namespace {

Matrix solve_impl(const Matrix& a, const Matrix& rhs) {
  require_square_finite(a, "solve");
  if (a.rows() != rhs.rows()) {
    throw std::invalid_argument("solve: rhs rows do not match matrix dimension");
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  Matrix x = lu.solve(rhs);
  // One sweep of iterative refinement keeps the residual near round-off.
  x += lu.solve(rhs - a * x);
  const double residual = (a * x - rhs).norm();
  const double bound = 1e-12 * (1.0 + rhs.norm());
  if (!x.allFinite() || residual > bound) {
    std::ostringstream msg;
    msg << "solve: residual " << residual << " exceeds " << bound
        << " (estimated condition " << 1.0 / std::max(lu.rcond(), 1e-300) << ")";
    throw std::runtime_error(msg.str());
  }
  return x;
}

} // namespace

Vector solve(const Matrix& a, const Vector& rhs) {
  return Vector(solve_impl(a, Matrix(rhs)));
}

Matrix solve(const Matrix& a, const Matrix& rhs) { return solve_impl(a, rhs); }

Vector vec(const Matrix& p) {
  return Eigen::Map<const Vector>(p.data(), p.size());
}

Matrix unvec(const Vector& v, Eigen::Index rows) {
  if (rows <= 0 || v.size() % rows != 0) {
    throw std::invalid_argument("unvec: vector length not divisible by row count");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, v.size() / rows);
}

} // namespace sdelawson::linalg
