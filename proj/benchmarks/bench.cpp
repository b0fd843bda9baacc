// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "sdelawson/experiments.hpp"
#include "sdelawson/problems.hpp"
#include "sdelawson/stability.hpp"

using namespace sdelawson;

namespace {

Matrix random_matrix(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.5);
  Matrix a(n, n);
  for (int i = 0; i < n * n; ++i) a(i / n, i % n) = normal(rng);
  return a;
}

void BM_expm(benchmark::State& state) {
  const Matrix a = random_matrix(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(linalg::expm(a));
  }
}
BENCHMARK(BM_expm)->Arg(2)->Arg(4)->Arg(8);

void BM_spectral_radius(benchmark::State& state) {
  const Matrix a = random_matrix(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(linalg::spectral_radius(a));
  }
}
BENCHMARK(BM_spectral_radius)->Arg(4)->Arg(16);

void BM_sample_grid(benchmark::State& state) {
  std::uint64_t path = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_grid(7, path++, 1, 1024, 1.0 / 1024, true));
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_sample_grid);

void BM_integrate_scheme(benchmark::State& state, const char* id) {
  const auto problem = problems::nonlinear_oscillator(1.0);
  const RegisteredScheme scheme = parse_scheme(id);
  const SemiLinearSde sde = scheme.native_calculus == Interpretation::Stratonovich
                                ? stratonovich_from_ito(problem)
                                : problem;
  const int steps = 256;
  const auto grid = make_grid(0.0, 1.0, steps, (Vector(2) << 1.0, 0.0).finished());
  std::uint64_t path = 0;
  for (auto _ : state) {
    const NoiseGrid noise = sample_grid(11, path++, 1, steps, 1.0 / steps, scheme.needs_dz);
    auto method = make_method(sde, scheme);
    benchmark::DoNotOptimize(integrate_final(sde, *method, grid, noise));
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK_CAPTURE(BM_integrate_scheme, em_dsl, "em-dsl");
BENCHMARK_CAPTURE(BM_integrate_scheme, platen_dsl, "platen-dsl");
BENCHMARK_CAPTURE(BM_integrate_scheme, midpoint_fsl, "midpoint-fsl");
BENCHMARK_CAPTURE(BM_integrate_scheme, platen15_dsl, "platen15-dsl");
BENCHMARK_CAPTURE(BM_integrate_scheme, implicit_platen, "implicit-platen");

void BM_region_column(benchmark::State& state) {
  const stability::RegionProblem problem{stability::RegionProblem::Kind::Oscillator, 0.0, M_PI};
  stability::RegionScanSpec spec;
  spec.lambda_min = -0.5;
  spec.lambda_max = -0.5;
  spec.columns = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        stability::region_scan(problem, stability::BoundaryKind::PlatenDsl, spec));
  }
}
BENCHMARK(BM_region_column);

} // namespace

BENCHMARK_MAIN();
