// Copyright (c) the sdelawson authors
// SPDX-License-Identifier: Apache-2.0

#include "sdelawson/csv.hpp"

#include <charconv>
#include <stdexcept>
#include <system_error>

namespace sdelawson::csv {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc()) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buf, res.ptr);
}

Writer::Writer(std::ostream& out, std::string comment) : out_(out) {
  out_ << "# " << comment << "\n";
}

void Writer::header(const std::vector<std::string>& columns) {
  if (header_written_) {
    throw std::logic_error("csv::Writer: header already written");
  }
  columns_ = columns.size();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out_ << (i ? "," : "") << columns[i];
  }
  out_ << "\n";
  header_written_ = true;
}

void Writer::row(const std::vector<std::optional<double>>& values) {
  if (!header_written_ || values.size() != columns_) {
    throw std::logic_error("csv::Writer: row does not match header");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    out_ << (i ? "," : "");
    if (values[i]) {
      out_ << format_double(*values[i]);
    }
  }
  out_ << "\n";
}

void Writer::raw_row(const std::vector<std::string>& values) {
  if (!header_written_ || values.size() != columns_) {
    throw std::logic_error("csv::Writer: row does not match header");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    out_ << (i ? "," : "") << values[i];
  }
  out_ << "\n";
}

} // namespace sdelawson::csv
