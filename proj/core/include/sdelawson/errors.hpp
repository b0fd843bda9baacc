// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sdelawson {

/// Newton or eigensolver breakdown; the CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// State norm passed the blow-up threshold (or went non-finite) at `step`.
struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, int step_index)
      : std::runtime_error(what + " at step " + std::to_string(step_index)), step(step_index) {}
  int step;
};

} // namespace sdelawson
