// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

// Event-driven dialogue manager.
//
// A user turn runs in fixed stages: input rails (flows starting with
// `user ...`), user-intent generation, next-step decision, flow execution with
// bot-message resolution, output rails (flows starting with `bot ...`) after
// every non-rail bot message, then Listen.
//
// Bot messages are held back until the end of the turn so rails can retract
// them (`bot remove last message`, `stop`). Each delivered message is then
// committed to the history as a BotIntent followed by its
// StartUtteranceBotAction.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "railgate/colang/ast.hpp"
#include "railgate/embedding/index.hpp"
#include "railgate/llm/gateway.hpp"
#include "railgate/llm/prompts.hpp"
#include "railgate/rails/verdict.hpp"
#include "railgate/runtime/actions.hpp"
#include "railgate/runtime/events.hpp"

namespace railgate::runtime {

/// Thrown inside a turn that exceeds its event budget; the turn then ends with
/// the fallback message.
class EventLoopOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlowHead {
  enum class Status { kActive, kCompleted, kAborted };

  std::string flow_name;
  int element_index = 0;  // index into the compiled flow; 0 means not started
  Status status = Status::kActive;
  std::map<std::string, Value> local_bindings;

  bool operator==(const FlowHead&) const = default;
};

const char* head_status_name(FlowHead::Status status);

struct DialogueState {
  std::vector<Event> history;
  Context context;
  std::vector<FlowHead> flow_heads;
  std::string config_id;

  bool operator==(const DialogueState&) const = default;
};

struct FlowStep {
  std::string flow_name;
  std::string element;  // Colang rendering of the next element to run
  bool operator==(const FlowStep&) const = default;
};
struct LlmFallback {
  bool operator==(const LlmFallback&) const = default;
};
struct NoOp {
  bool operator==(const NoOp&) const = default;
};
using Decision = std::variant<FlowStep, LlmFallback, NoOp>;

struct TurnTrace {
  std::string user_intent;
  bool intent_matched = false;
  std::string decision;  // flow name, "llm_fallback", or empty when no decision was made
  std::vector<rails::RailVerdict> rail_verdicts;
  std::vector<llm::LlmCallRecord> llm_calls;
  std::vector<Event> events;
  std::optional<std::string> error;
};

struct TurnResult {
  std::vector<std::string> messages;
  TurnTrace trace;
};

struct EngineOptions {
  int event_budget = 100;
  std::string fallback_message = "I'm sorry, I can't respond right now.";
  std::string default_bot_intent = "general response";
  /// Reset to null at the start of every turn.
  std::vector<std::string> turn_scoped_variables = {"last_bot_prompt", "relevant_chunks"};
};

struct EngineParts {
  colang::Script script;
  llm::PromptConfig prompts = llm::PromptConfig::defaults();
  embedding::RetrievalConfig retrieval;
  std::shared_ptr<llm::LlmGateway> gateway;
  std::shared_ptr<embedding::EmbeddingProvider> embedder;
  ActionRegistry actions;
  std::vector<std::string> knowledge_chunks;
  EngineOptions options;
  std::string config_id;
};

/// Immutable after construction and shareable across threads; sessions are
/// separate DialogueState values, each used by one thread at a time.
class Engine {
 public:
  /// Compiles flows and builds the retrieval indexes. Throws UnknownAction when
  /// a flow executes an unregistered action.
  explicit Engine(EngineParts parts);
  ~Engine();

  DialogueState new_session() const;

  /// Runs one full user turn and returns the delivered bot messages. Provider
  /// failures and budget overruns end the turn with the fallback message and
  /// set trace.error. Throws std::invalid_argument on blank input.
  TurnResult run_turn(DialogueState& state, std::string_view user_text) const;

  /// Event-level entry point. A user utterance runs a full turn, a UserIntent
  /// runs the turn from the next-step decision, a BotIntent delivers that
  /// intent (with output rails). Other events are appended as-is. Returns the
  /// events appended after the input event.
  std::vector<Event> process_event(DialogueState& state, EventBody event) const;

  Decision decide_next_step(const DialogueState& state, std::string_view user_intent) const;

  /// Runs a registered action outside a turn, recording its events.
  Value execute_action(DialogueState& state, std::string_view name, const std::map<std::string, Value>& args) const;

  /// Rebuilds a session by re-running every recorded user utterance. With
  /// deterministic providers the result equals the recorded state.
  DialogueState replay(const std::vector<Event>& history) const;

  /// Transcript of the delivered conversation, for prompts and display.
  static llm::Transcript transcript(const std::vector<Event>& history);

  const colang::Script& script() const;
  const embedding::IndexSet& indexes() const;
  const EngineOptions& options() const;
  const std::string& config_id() const;
  /// User canonical forms known to the script, definitions first.
  const std::vector<std::string>& defined_user_forms() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace railgate::runtime
