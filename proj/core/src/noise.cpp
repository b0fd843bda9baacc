// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#include "sdelawson/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sdelawson {

namespace detail {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

inline double to_unit_open(std::uint64_t x) {
  // (0, 1]: never zero, safe under log.
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

inline double to_unit_halfopen(std::uint64_t x) {
  // [0, 1)
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

} // namespace

std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key) {
  std::array<std::uint64_t, 4> c = counter;
  std::array<std::uint64_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

double normal_draw(std::uint64_t seed, std::uint64_t path_index,
                   std::uint64_t step, std::uint64_t slot) {
  const auto words = philox4x64({step, slot, 0, 0}, {seed, path_index});
  const double u1 = to_unit_open(words[0]);
  const double u2 = to_unit_halfopen(words[1]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace detail

namespace {

// Pairwise tree sum: for power-of-two spans the coarse-grid tree is a
// subtree of the fine-grid tree, so the total is coarsening-invariant
// bit for bit.
double pairwise_sum(const Eigen::MatrixXd& dw, int m, int begin, int count) {
  if (count == 1) return dw(begin, m);
  const int half = count / 2;
  return pairwise_sum(dw, m, begin, half) + pairwise_sum(dw, m, begin + half, count - half);
}

} // namespace

Vector NoiseGrid::terminal_increment() const {
  Vector w = Vector::Zero(channels);
  for (int m = 0; m < channels; ++m) {
    w[m] = steps > 0 ? pairwise_sum(dW, m, 0, steps) : 0.0;
  }
  return w;
}

NoiseGrid sample_grid(std::uint64_t seed, std::uint64_t path_index, int channels,
                      int steps, double step_size, bool need_dz) {
  if (steps < 1) {
    throw std::invalid_argument("sample_grid: step count must be >= 1");
  }
  if (channels < 0) {
    throw std::invalid_argument("sample_grid: channel count must be >= 0");
  }
  if (!(step_size > 0.0)) {
    throw std::invalid_argument("sample_grid: step size must be positive");
  }
  if (need_dz && channels != 1) {
    throw std::invalid_argument("sample_grid: dZ is defined for a single channel only");
  }

  NoiseGrid g;
  g.channels = channels;
  g.steps = steps;
  g.step_size = step_size;
  g.seed = seed;
  g.path_index = path_index;
  g.dW.resize(steps, channels);

  const double sqrt_h = std::sqrt(step_size);
  for (int n = 0; n < steps; ++n) {
    for (int m = 0; m < channels; ++m) {
      g.dW(n, m) = sqrt_h * detail::normal_draw(seed, path_index, static_cast<std::uint64_t>(n),
                                                static_cast<std::uint64_t>(m));
    }
  }
  if (need_dz) {
    Eigen::VectorXd dz(steps);
    const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
    for (int n = 0; n < steps; ++n) {
      const double zeta = sqrt_h * detail::normal_draw(seed, path_index, static_cast<std::uint64_t>(n),
                                                       static_cast<std::uint64_t>(channels));
      dz[n] = 0.5 * step_size * (g.dW(n, 0) + zeta * inv_sqrt3);
    }
    g.dZ = std::move(dz);
  }
  return g;
}

namespace {

NoiseGrid coarsen_blocks(const NoiseGrid& grid, int factor) {
  NoiseGrid out;
  out.channels = grid.channels;
  out.steps = grid.steps / factor;
  out.step_size = grid.step_size * factor;
  out.seed = grid.seed;
  out.path_index = grid.path_index;
  out.dW = Eigen::MatrixXd::Zero(out.steps, out.channels);
  for (int n = 0; n < out.steps; ++n) {
    for (int j = 0; j < factor; ++j) {
      for (int m = 0; m < out.channels; ++m) {
        out.dW(n, m) += grid.dW(n * factor + j, m);
      }
    }
  }
  if (grid.dZ) {
    Eigen::VectorXd dz = Eigen::VectorXd::Zero(out.steps);
    for (int n = 0; n < out.steps; ++n) {
      double partial = 0.0; // W(t_{nk+j}) - W(t_{nk})
      for (int j = 0; j < factor; ++j) {
        dz[n] += (*grid.dZ)[n * factor + j] + grid.step_size * partial;
        partial += grid.dW(n * factor + j, 0);
      }
    }
    out.dZ = std::move(dz);
  }
  return out;
}

} // namespace

NoiseGrid coarsen(const NoiseGrid& grid, int factor) {
  if (factor < 1 || grid.steps % factor != 0) {
    throw std::invalid_argument("coarsen: factor must divide the step count");
  }
  if (factor == 1) {
    return grid;
  }
  // Powers of two are peeled off as repeated halvings so that
  // coarsen(coarsen(g, 2), 2) and coarsen(g, 4) are the same computation.
  NoiseGrid out = grid;
  int remaining = factor;
  while (remaining % 2 == 0) {
    out = coarsen_blocks(out, 2);
    remaining /= 2;
  }
  if (remaining > 1) {
    out = coarsen_blocks(out, remaining);
  }
  return out;
}

} // namespace sdelawson
