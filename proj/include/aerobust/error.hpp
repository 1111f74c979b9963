// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace aerobust {

/// Base for every error the toolkit raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed image stream. Carries the byte offset when the codec reports one.
class DecodeError : public Error {
 public:
  explicit DecodeError(const std::string& what, std::optional<std::size_t> offset = std::nullopt)
      : Error(offset ? what + " (at byte " + std::to_string(*offset) + ")" : what), offset_(offset) {}

  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  std::optional<std::size_t> offset_;
};

/// Malformed text input (annotations, detections, CSV, manifests).
class ParseError : public Error {
 public:
  ParseError(const std::string& detail, std::size_t line, const std::string& source = {})
      : Error((source.empty() ? std::string() : source + ":") + "line " + std::to_string(line) + ": " + detail),
        detail_(detail),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t line_;
};

/// Inconsistent job or evaluation configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An EvalMatrix lacks a cell that an aggregate needs.
class IncompleteMatrixError : public Error {
 public:
  explicit IncompleteMatrixError(const std::string& cell)
      : Error("incomplete evaluation matrix: missing " + cell), cell_(cell) {}

  /// Missing cell as "kind/severity".
  const std::string& cell() const noexcept { return cell_; }

 private:
  std::string cell_;
};

/// A ratio with a zero denominator (clean AP of zero).
class UndefinedRatioError : public Error {
 public:
  using Error::Error;
};

/// A cloud source yields no pixel above its threshold.
class EmptyCloudError : public Error {
 public:
  using Error::Error;
};

}  // namespace aerobust
