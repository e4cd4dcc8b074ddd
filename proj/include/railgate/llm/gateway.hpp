// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "railgate/llm/provider.hpp"

namespace railgate::llm {

struct GatewaySettings {
  double intent_temperature = 0.0;
  double next_step_temperature = 0.0;
  double judgment_temperature = 0.0;
  double bot_message_temperature = 0.7;
  double sample_temperature = 1.0;
  int short_max_tokens = 32;   // intent and next-step
  int long_max_tokens = 256;   // messages, judgments, samples
  std::vector<std::string> stop = {"\nuser", "\n#"};
  int max_retries = 1;
};

struct LlmCallRecord {
  TaskKind kind;
  double temperature;
  int64_t latency_ms;
  bool ok;
};

/// While alive, records every gateway call made on the constructing thread
/// (including the calls sample_n fans out to other threads). Scopes nest; only
/// the innermost one records.
class CallCapture {
 public:
  CallCapture();
  ~CallCapture();
  CallCapture(const CallCapture&) = delete;
  CallCapture& operator=(const CallCapture&) = delete;

  const std::vector<LlmCallRecord>& calls() const { return calls_; }

 private:
  friend class LlmGateway;
  CallCapture* previous_;
  std::vector<LlmCallRecord> calls_;
};

/// Provider front end shared by all sessions: applies the temperature and
/// token policy, truncates at stop sequences, and retries retryable failures.
class LlmGateway {
 public:
  explicit LlmGateway(std::shared_ptr<LlmProvider> provider, GatewaySettings settings = {});

  LlmTask make_task(TaskKind kind, std::string prompt) const;

  /// Throws std::invalid_argument on an empty prompt, ProviderError after the
  /// retry budget, NoMatchingRule from mocks. The returned text never contains
  /// a stop sequence.
  Completion complete(const LlmTask& task);

  Completion run(TaskKind kind, std::string prompt) { return complete(make_task(kind, std::move(prompt))); }

  /// n >= 2 completions of `prompt` as sample_response tasks, in request order.
  /// Fans out concurrently when the provider is order-independent. Any failure
  /// fails the whole call. `temperature` overrides the configured sample
  /// temperature.
  std::vector<std::string> sample_n(const std::string& prompt, int n, std::optional<double> temperature = {});

  const GatewaySettings& settings() const { return settings_; }
  LlmProvider& provider() { return *provider_; }

 private:
  Completion complete_uncaptured(const LlmTask& task, LlmCallRecord& record);

  std::shared_ptr<LlmProvider> provider_;
  GatewaySettings settings_;
};

/// Cuts `text` at the earliest occurrence of any stop sequence.
std::string truncate_at_stop(std::string text, const std::vector<std::string>& stop);

}  // namespace railgate::llm
