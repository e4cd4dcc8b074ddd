// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "railgate/errors.hpp"

namespace railgate::llm {

enum class TaskKind {
  kGenerateUserIntent,
  kGenerateNextStep,
  kGenerateBotMessage,
  kRailJudgment,
  kSampleResponse,
};

const char* task_kind_name(TaskKind kind);
std::optional<TaskKind> parse_task_kind(std::string_view name);

/// One generation request. Build these through LlmGateway::make_task so the
/// temperature and token policy is applied consistently.
struct LlmTask {
  TaskKind kind = TaskKind::kGenerateUserIntent;
  std::string prompt;
  double temperature = 0.0;
  std::vector<std::string> stop;
  int max_tokens = 256;
};

struct TokenCounts {
  int prompt = 0;
  int completion = 0;
};

struct Completion {
  std::string text;
  std::string provider_name;
  int64_t latency_ms = 0;
  std::optional<TokenCounts> token_counts;
};

/// A mock provider found no rule for the request.
class NoMatchingRule : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The model's next-step output was not a `bot <form>` line.
class MalformedStep : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LlmProvider {
 public:
  virtual ~LlmProvider() = default;

  virtual std::string name() const = 0;

  /// Throws ProviderError on transport or status failures.
  virtual Completion complete(const LlmTask& task) = 0;

  /// Whether independent requests may be issued from several threads and still
  /// produce the same answers as a sequential run. Mocks with cycling rules
  /// return false.
  virtual bool order_independent() const { return true; }
};

}  // namespace railgate::llm
