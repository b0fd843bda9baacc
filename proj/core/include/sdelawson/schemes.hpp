// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdelawson/errors.hpp"
#include "sdelawson/model.hpp"
#include "sdelawson/noise.hpp"

namespace sdelawson {

/// Randomness consumed by one step.
struct StepNoise {
  double h = 0.0;
  Vector dW;                 // M entries (channels m = 1..M)
  std::optional<double> dZ;  // time-integrated increment, single channel
};

StepNoise at_step(const NoiseGrid& grid, int n);

/// Concrete coefficient arrays for one step: Z[m] is s x s, z[m] has s
/// entries, for m = 0..M with the time channel m = 0 (dW_0 = h).
struct TableauCoefficients {
  std::vector<Matrix> Z;
  std::vector<Vector> z;
};

/// A stochastic Runge-Kutta tableau: stage count plus a generator mapping
/// the step randomness to coefficient arrays. Stage offsets c_m^i (row sums
/// of Z[m]) and increments c_m (sums of z[m]) are always derived, never
/// stored.
struct SrkTableau {
  std::string name;
  int stages = 1;
  int required_channels = -1; // -1: any M
  bool implicit = false;
  bool needs_dz = false;
  double strong_order = 0.5;
  double weak_order = 1.0;
  Interpretation native_calculus = Interpretation::Ito;
  std::function<TableauCoefficients(int channels, const StepNoise&)> coefficients;
};

SrkTableau tableau_euler_maruyama();
SrkTableau tableau_platen();
SrkTableau tableau_midpoint();
SrkTableau tableau_platen_strong_15();
SrkTableau tableau_platen_weak_2();

/// Which linear parts go into the exponential operator:
///  Raw - none (the underlying scheme),
///  Dsl - drift only; the deterministic exponentials are reused across steps,
///  Fsl - drift and noise matrices; exponentials are per-step.
enum class LawsonMode { Raw, Dsl, Fsl };

struct SchemeSpec {
  SrkTableau tableau;
  LawsonMode mode = LawsonMode::Raw;
};

struct Trajectory {
  std::vector<double> times;   // N+1
  std::vector<Vector> states;  // N+1, states[0] = x0
};

/// Integration stops and reports divergence once a state norm passes this.
inline constexpr double kBlowUpThreshold = 1e12;

class OneStepMethod {
 public:
  virtual ~OneStepMethod() = default;
  virtual Vector step(double t, const Vector& y, const StepNoise& noise) = 0;
  virtual bool needs_dz() const { return false; }
};

/// Generic stepper for the exponential (Lawson-transformed) SRK family.
/// One instance per worker; the exponential cache is not synchronized.
class LawsonStepper : public OneStepMethod {
 public:
  LawsonStepper(const SemiLinearSde& sde, SchemeSpec spec);
  ~LawsonStepper() override;
  Vector step(double t, const Vector& y, const StepNoise& noise) override;
  bool needs_dz() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  friend class GlobalLawsonIntegrator;
};

/// Drift-implicit Platen strong order 1.0 comparator. The drift is taken
/// implicitly (linear solve for linear drift, modified Newton otherwise);
/// the diffusion terms stay explicit at Y_n and the Platen support point.
class ImplicitPlatenStepper : public OneStepMethod {
 public:
  explicit ImplicitPlatenStepper(const SemiLinearSde& sde);
  ~ImplicitPlatenStepper() override;
  Vector step(double t, const Vector& y, const StepNoise& noise) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot step through the generic tableau machinery.
Vector srk_lawson_step(const SemiLinearSde& sde, const SchemeSpec& spec, const Vector& y,
                       double t, const StepNoise& noise);

/// Closed-form fast paths; each must agree with the generic stepper (the
/// pairing is a deliberate cross-check, see the tests).
Vector em_sl_step(const SemiLinearSde& sde, LawsonMode mode, const Vector& y, double t,
                  const StepNoise& noise);
Vector platen_sl_step(const SemiLinearSde& sde, LawsonMode mode, const Vector& y, double t,
                      const StepNoise& noise);

Vector implicit_platen_step(const SemiLinearSde& sde, const Vector& y, double t, double h,
                            const Vector& dW);

/// Iterate a one-step method over the grid, consuming one NoiseGrid row per
/// step. Throws DivergenceError with the step index when a state blows up
/// and NumericalError when a sub-solver fails.
Trajectory integrate(const SemiLinearSde& sde, OneStepMethod& method,
                     const IntegrationGrid& grid, const NoiseGrid& noise);
Trajectory integrate(const SemiLinearSde& sde, const SchemeSpec& spec,
                     const IntegrationGrid& grid, const NoiseGrid& noise);
Vector integrate_final(const SemiLinearSde& sde, OneStepMethod& method,
                       const IntegrationGrid& grid, const NoiseGrid& noise);

/// Global variant of the transformation: integrates the single transformed
/// equation for V^0 and maps back with the accumulated exponent
/// Lbar_n = sum_i deltaL^i. Exists as the equivalence oracle for the local
/// scheme (both produce the same points in exact arithmetic).
Trajectory integrate_global(const SemiLinearSde& sde, const SchemeSpec& spec,
                            const IntegrationGrid& grid, const NoiseGrid& noise);

/// Scheme registry. Identifiers are "<tableau>[-<mode>]" with tableau in
/// {em, platen, midpoint, platen15, platen-weak2}, mode in {raw, dsl, fsl}
/// (default raw), plus the comparator "implicit-platen".
struct RegisteredScheme {
  std::string id;
  bool is_implicit_platen = false;
  std::optional<SchemeSpec> spec;
  double strong_order = 0.5;
  Interpretation native_calculus = Interpretation::Ito;
  bool needs_dz = false;
  int required_channels = -1;
};

RegisteredScheme parse_scheme(const std::string& id);
std::vector<std::string> known_schemes();
std::unique_ptr<OneStepMethod> make_method(const SemiLinearSde& sde, const RegisteredScheme& scheme);

} // namespace sdelawson
