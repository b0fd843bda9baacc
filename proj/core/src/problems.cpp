// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#include "sdelawson/problems.hpp"

#include <cmath>

namespace sdelawson::problems {

namespace {

Matrix rotation_generator() {
  Matrix j(2, 2);
  j << 0.0, 1.0, -1.0, 0.0;
  return j;
}

} // namespace

SemiLinearSde nonlinear_oscillator(double lambda) {
  const Matrix J = rotation_generator();
  Matrix a0 = -lambda * Matrix::Identity(2, 2);
  Matrix a1 = 0.2 * J;
  StateFunction g0 = [J](double, const Vector& x) {
    const double s = x[0] + x[1];
    const double u0 = 0.2 * s * s * s * s * s;
    return Vector(u0 * (J * x));
  };
  JacobianFunction j0 = [J](double, const Vector& x) {
    const double s = x[0] + x[1];
    const double u0 = 0.2 * s * s * s * s * s;
    const double du0 = s * s * s * s; // d/ds of s^5/5
    Matrix jac = u0 * J;
    jac += (J * x) * Eigen::RowVector2d(du0, du0);
    return jac;
  };
  return make_semilinear_sde(Interpretation::Ito, {std::move(a0), std::move(a1)},
                             {std::move(g0), {}}, {std::move(j0), {}});
}

SemiLinearSde scalar_linear(double lambda, double sigma, double mu) {
  Matrix a0(1, 1), a1(1, 1), s(1, 1);
  a0 << lambda;
  a1 << mu;
  s << sigma;
  StateFunction g0;
  JacobianFunction j0;
  if (sigma != 0.0) {
    g0 = affine_remainder(s);
    j0 = constant_jacobian(s);
  }
  return make_semilinear_sde(Interpretation::Ito, {std::move(a0), std::move(a1)},
                             {std::move(g0), {}}, {std::move(j0), {}});
}

SemiLinearSde orthogonal_noise(double lambda, double b, double sigma) {
  Matrix a0(2, 2);
  a0 << lambda, b, 0.0, lambda;
  Matrix noise = sigma * rotation_generator();
  StateFunction g1;
  JacobianFunction j1;
  if (sigma != 0.0) {
    g1 = affine_remainder(noise);
    j1 = constant_jacobian(noise);
  }
  return make_semilinear_sde(Interpretation::Ito, {std::move(a0), Matrix::Zero(2, 2)},
                             {{}, std::move(g1)}, {{}, std::move(j1)});
}

SemiLinearSde damped_oscillator(double lambda, double omega2, double sigma) {
  const Matrix J = rotation_generator();
  Matrix a0 = lambda * Matrix::Identity(2, 2) + omega2 * J;
  Matrix a1 = sigma * J;
  return make_semilinear_sde(Interpretation::Ito, {std::move(a0), std::move(a1)}, {{}, {}});
}

} // namespace sdelawson::problems
