// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace railgate {

/// A remote model or embedding service failed. `retryable()` is true for
/// transport failures, timeouts, 429 and 5xx responses.
class ProviderError : public std::runtime_error {
 public:
  ProviderError(const std::string& what, bool retryable, int status = 0)
      : std::runtime_error(what), retryable_(retryable), status_(status) {}

  bool retryable() const { return retryable_; }
  /// HTTP status, 0 when no response was received.
  int status() const { return status_; }

 private:
  bool retryable_;
  int status_;
};

/// Invalid application configuration (bad config.yml, script errors,
/// unknown actions). The message lists file:line diagnostics.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace railgate
