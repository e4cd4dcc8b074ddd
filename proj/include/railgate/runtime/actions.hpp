// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "railgate/embedding/index.hpp"
#include "railgate/errors.hpp"
#include "railgate/llm/gateway.hpp"
#include "railgate/llm/prompts.hpp"
#include "railgate/rails/verdict.hpp"
#include "railgate/runtime/value.hpp"

namespace railgate::runtime {

class UnknownAction : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Shared, immutable-after-load services an action may use.
struct ActionServices {
  llm::LlmGateway& gateway;
  embedding::EmbeddingProvider& embedder;
  const embedding::IndexSet& indexes;
  const llm::PromptConfig& prompts;
  const embedding::RetrievalConfig& retrieval;
};

/// What an action sees: its evaluated arguments, read access to the session
/// context (including last_user_message and last_bot_message), the shared
/// services, and a sink for rail verdicts that ends up in the turn trace.
struct ActionCall {
  const std::map<std::string, Value>& args;
  const Context& context;
  const ActionServices& services;
  std::vector<rails::RailVerdict>& verdicts;

  /// Argument by name, else null.
  Value arg(const std::string& name) const;
  /// Context variable by name, else null.
  Value get(const std::string& key) const;
};

/// Returns the action's result value; exceptions mark the action failed.
using Action = std::function<Value(ActionCall&)>;

class ActionRegistry {
 public:
  /// Names are normalized (`Check Facts` -> `check_facts`). Throws
  /// std::invalid_argument on duplicates.
  void add(std::string_view name, Action action);

  const Action* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Action, std::less<>> actions_;
};

/// retrieve_relevant_chunks: the k_examples nearest knowledge-base chunks to
/// the last user message, joined by blank lines (null when there is no
/// knowledge base).
void register_builtin_actions(ActionRegistry& registry);

}  // namespace railgate::runtime
