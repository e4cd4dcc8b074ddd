// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace railgate::colang {

enum class Severity { kError, kWarning };

struct Diagnostic {
  Severity severity = Severity::kError;
  std::string message;
  int line = 0;
  int column = 0;
  std::string file;

  bool is_error() const { return severity == Severity::kError; }
  /// `file:line:col: error: message`
  std::string to_string() const;
};

bool has_errors(const std::vector<Diagnostic>& diags);

/// Base for every lexing/parsing failure. Carries at least one diagnostic;
/// `diagnostics().front()` is the first error encountered.
class ColangError : public std::runtime_error {
 public:
  explicit ColangError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }
  const Diagnostic& first() const { return diags_.front(); }

 private:
  std::vector<Diagnostic> diags_;
};

class TabIndentationError : public ColangError {
 public:
  using ColangError::ColangError;
};

class UnterminatedStringError : public ColangError {
 public:
  using ColangError::ColangError;
};

class ParseError : public ColangError {
 public:
  using ColangError::ColangError;
};

}  // namespace railgate::colang
