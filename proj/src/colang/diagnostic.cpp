// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/colang/diagnostic.hpp"

#include <algorithm>

namespace railgate::colang {

std::string Diagnostic::to_string() const {
  std::string out = file.empty() ? std::string("<input>") : file;
  out += ":" + std::to_string(line) + ":" + std::to_string(column) + ": ";
  out += severity == Severity::kError ? "error: " : "warning: ";
  out += message;
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.is_error(); });
}

namespace {
std::string summarize(const std::vector<Diagnostic>& diags) {
  if (diags.empty()) return "colang error";
  std::string out = diags.front().to_string();
  if (diags.size() > 1) out += " (+" + std::to_string(diags.size() - 1) + " more)";
  return out;
}
}  // namespace

ColangError::ColangError(std::vector<Diagnostic> diags)
    : std::runtime_error(summarize(diags)), diags_(std::move(diags)) {}

}  // namespace railgate::colang
