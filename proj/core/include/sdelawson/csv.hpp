// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sdelawson::csv {

/// Shortest round-trip decimal rendering of a double (std::to_chars), so
/// identical numbers always produce identical bytes.
std::string format_double(double value);

/// Minimal CSV emitter: one `# key=value ...` comment line recording the
/// resolved configuration, a header row, then data rows. Missing optional
/// values render as empty fields.
class Writer {
 public:
  Writer(std::ostream& out, std::string comment);

  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::optional<double>>& values);
  void raw_row(const std::vector<std::string>& values);

 private:
  std::ostream& out_;
  bool header_written_ = false;
  std::size_t columns_ = 0;
};

} // namespace sdelawson::csv
