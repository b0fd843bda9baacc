// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "sdelawson/linalg.hpp"

namespace sdelawson {

/// Wiener increments for one path on an equidistant grid, reproducible
/// bit-for-bit from (seed, path_index). dZ carries the time-integrated
/// increments needed by strong order-1.5 schemes (single channel only).
struct NoiseGrid {
  int channels = 0;   // M
  int steps = 0;      // N
  double step_size = 0.0;
  Eigen::MatrixXd dW;               // N x M
  std::optional<Eigen::VectorXd> dZ; // N
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;

  /// W_m(T) - W_m(t0): per-channel sum of increments, in step order.
  Vector terminal_increment() const;
};

/// Draw a grid of independent Normal(0, h) increments. Increments are keyed
/// by (seed, path_index, step, channel) through a counter-based generator,
/// so any path can be generated independently on any worker.
/// With need_dz (channels must be 1), dZ^n = h/2 (dW^n + zeta^n/sqrt(3))
/// with an independent zeta^n ~ Normal(0, h), matching E(dZ)=0,
/// Var(dZ)=h^3/3 and Cov(dW,dZ)=h^2/2.
NoiseGrid sample_grid(std::uint64_t seed, std::uint64_t path_index, int channels,
                      int steps, double step_size, bool need_dz = false);

/// Block-sum the increments of `grid` into steps of size factor*h. The
/// factor must divide the step count. Sums run in step order, so repeated
/// coarsening of dW reproduces direct coarsening bit-for-bit. When dZ is
/// present it is aggregated exactly as the time integral of the path:
///   dZ' = sum_j (dZ_j + h * S_j),  S_j the in-block partial sum of dW.
NoiseGrid coarsen(const NoiseGrid& grid, int factor);

namespace detail {

/// Philox4x64-10 block cipher (counter-based PRNG).
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key);

/// Standard normal draw keyed by (seed, path_index, step, slot).
double normal_draw(std::uint64_t seed, std::uint64_t path_index,
                   std::uint64_t step, std::uint64_t slot);

} // namespace detail
} // namespace sdelawson
