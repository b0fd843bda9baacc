// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace sdelawson {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// True when every entry of `a` is finite (no NaN/Inf).
bool all_finite(const Matrix& a);

/// Matrix exponential e^a for a square matrix with finite entries.
/// The exact zero matrix maps to the exact identity (bitwise), so schemes
/// with trivial exponents reproduce their underlying method without rounding.
/// Throws std::invalid_argument on non-square or non-finite input.
Matrix expm(const Matrix& a);

/// Kronecker product, standard block layout: (pq)x(rs) from pxr and qxs.
Matrix kron(const Matrix& a, const Matrix& b);

/// Largest eigenvalue modulus of a square matrix.
/// Throws std::runtime_error if the dense eigensolver fails to converge.
double spectral_radius(const Matrix& a);

/// ab - ba. Throws std::invalid_argument on dimension mismatch.
Matrix commutator(const Matrix& a, const Matrix& b);

/// max-norm of the commutator below tol * (1 + |a|_max * |b|_max).
bool is_commuting(const Matrix& a, const Matrix& b, double tol = 1e-12);

/// Solve a x = rhs via partially pivoted LU with one step of iterative
/// refinement; the result satisfies |a x - rhs|_2 <= 1e-12 (1 + |rhs|_2).
/// Throws std::runtime_error (with a condition estimate) otherwise.
Vector solve(const Matrix& a, const Vector& rhs);
Matrix solve(const Matrix& a, const Matrix& rhs);

/// Column-major stacking of a matrix into a vector, and its inverse.
Vector vec(const Matrix& p);
Matrix unvec(const Vector& v, Eigen::Index rows);

} // namespace linalg
} // namespace sdelawson
