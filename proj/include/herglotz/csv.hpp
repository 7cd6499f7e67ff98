#pragma once

#include <charconv>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace herglotz {

/// Shortest-safe text for a double: 17 significant digits, '.' as decimal
/// point regardless of the global locale.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return {buf, res.ptr};
}

/// Strict locale-independent parse; the whole string must be consumed.
inline double parse_double(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || first == last)
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return value;
}

/// Comma-separated rows with LF line endings. The stream should be opened in
/// binary mode when it is a file.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header) : out_(out) {
    bool first = true;
    for (std::string_view h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) out_ << ',';
      out_ << format_double(v);
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

}  // namespace herglotz
