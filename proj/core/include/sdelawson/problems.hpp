// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sdelawson/model.hpp"

namespace sdelawson::problems {

/// Mildly stiff nonlinear oscillator with a linear attractor (Ito, d = 2):
///   dX = [-lambda I + U0(X) J] X dt + 0.2 J X dW,  U0(x) = (x1 + x2)^5 / 5,
/// with J = [[0,1],[-1,0]]. Stored with the maximal commuting split
/// A_0 = -lambda I, A_1 = 0.2 J; the skew structure makes the path norm
/// deterministic: |X(t)| = e^{(-lambda + 0.02) t} |X(0)|.
SemiLinearSde nonlinear_oscillator(double lambda);

/// Scalar linear test equation (Ito, d = 1):
///   dX = (lambda + sigma) X dt + mu X dW,
/// split so the exponential handles A_0 = lambda while g_0 = sigma x stays a
/// remainder; A_1 = mu.
SemiLinearSde scalar_linear(double lambda, double sigma, double mu);

/// Linear system with orthogonal noise (Ito, d = 2):
///   dX = [[lambda, b], [0, lambda]] X dt + sigma J X dW.
/// For b != 0 the drift does not commute with the noise matrix, so the noise
/// is kept as a remainder (A_1 = 0, g_1 = sigma J x): drift-only exponential
/// schemes apply, full ones would reject the pair.
SemiLinearSde orthogonal_noise(double lambda, double b, double sigma);

/// Damped/driven oscillator (Ito, d = 2):
///   dX = [[lambda, omega2], [-omega2, lambda]] X dt + sigma J X dW.
/// Drift and noise are both rotation-scalings, hence commute; stored with
/// A_1 = sigma J.
SemiLinearSde damped_oscillator(double lambda, double omega2, double sigma);

} // namespace sdelawson::problems
