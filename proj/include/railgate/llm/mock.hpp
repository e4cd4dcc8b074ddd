// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "railgate/llm/provider.hpp"

namespace railgate::llm {

struct MockRule {
  enum class Scope {
    kPrompt,  // substring anywhere in the prompt
    kTail,    // substring of the last nonempty prompt line
  };

  std::optional<TaskKind> task_kind;  // unset matches every kind
  std::string matcher;                // empty matches everything
  Scope scope = Scope::kPrompt;
  std::vector<std::string> responses;  // cycled on successive hits
  bool consume_once = false;
};

struct MockCall {
  TaskKind kind;
  std::string prompt;
  double temperature;
  std::vector<std::string> stop;
  int max_tokens;
  std::string response;
  int rule_index;
};

/// Rule-driven provider for tests and offline demos. The first matching rule,
/// in list order, answers; when none matches, NoMatchingRule is thrown. Every
/// answered call is logged.
class MockLlm : public LlmProvider {
 public:
  explicit MockLlm(std::vector<MockRule> rules = {});

  /// YAML or JSON: a list (or a map with key `rules`) of entries
  ///   {task: <kind>, match: <text>, scope: prompt|tail,
  ///    response: <text> | responses: [<text>...], once: <bool>}
  static std::vector<MockRule> parse_rules(const std::string& document);
  static std::vector<MockRule> load_rules(const std::string& path);

  void add_rule(MockRule rule);

  std::string name() const override { return "mock"; }
  Completion complete(const LlmTask& task) override;
  bool order_independent() const override { return false; }

  std::vector<MockCall> calls() const;
  size_t call_count() const;
  void clear_calls();

 private:
  struct Slot {
    MockRule rule;
    size_t next = 0;
    bool spent = false;
  };

  mutable std::mutex mu_;
  std::vector<Slot> slots_;
  std::vector<MockCall> calls_;
};

/// Wraps a callable; handy for oracle and adversarial fixtures.
class FunctionLlm : public LlmProvider {
 public:
  using Fn = std::function<std::string(const LlmTask&)>;

  explicit FunctionLlm(Fn fn, bool order_independent = true)
      : fn_(std::move(fn)), order_independent_(order_independent) {}

  std::string name() const override { return "function"; }
  Completion complete(const LlmTask& task) override { return Completion{fn_(task), name(), 0, std::nullopt}; }
  bool order_independent() const override { return order_independent_; }

 private:
  Fn fn_;
  bool order_independent_;
};

}  // namespace railgate::llm
