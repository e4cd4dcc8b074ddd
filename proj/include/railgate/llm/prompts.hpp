// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

// Four-part prompts for the three dialogue generation tasks and the parsing of
// their completions.
//
// Every prompt is: general instructions, a sample conversation, retrieved
// few-shot examples, and the current conversation, joined by blank lines and
// written in Colang syntax:
//
//   user "Hello there!"
//     express greeting
//   bot express greeting
//     "Hello! How can I assist you today?"

#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "railgate/embedding/index.hpp"
#include "railgate/llm/gateway.hpp"

namespace railgate::llm {

inline constexpr std::string_view kSampleHeader = "# This is how a conversation between a user and the bot can go:";
inline constexpr std::string_view kUserExamplesHeader = "# This is how the user talks:";
inline constexpr std::string_view kFlowExamplesHeader = "# This is how the bot thinks:";
inline constexpr std::string_view kBotExamplesHeader = "# This is how the bot talks:";
inline constexpr std::string_view kCurrentHeader = "# This is the current conversation between the user and the bot:";
inline constexpr std::string_view kExtraContextHeader = "# This is some additional context:";

/// Application-level prompt text. Loaded from a named template file; the
/// built-in default is a general assistant description plus a short greeting
/// and capabilities exchange.
struct PromptConfig {
  std::string general_instructions;
  std::string sample_conversation;

  static PromptConfig defaults();
};

struct PromptParts {
  std::string general_instructions;
  std::string sample_conversation;
  std::string fewshot_block;
  std::string current_conversation;

  /// Nonempty parts in declaration order, separated by one blank line.
  std::string render() const;
};

struct TranscriptLine {
  enum class Kind { kUserSaid, kUserIntent, kBotIntent, kBotSaid };
  Kind kind;
  std::string text;
};
using Transcript = std::vector<TranscriptLine>;

/// Full Colang rendering, one element per line, newline-terminated.
std::string render_conversation(const Transcript& transcript);

/// Canonical forms only (`user <form>` / `bot <form>`), the flow syntax the
/// next-step task completes.
std::string render_intents(const Transcript& transcript);

/// Few-shot block for generate_user_intent, generate_next_step or
/// generate_bot_message, examples in the given (score) order.
std::string render_fewshot(TaskKind kind, const std::vector<embedding::Neighbor>& examples);

/// `history` must end at the element to be completed: the user utterance for
/// intents, the user intent for next steps, the bot intent for messages.
/// `extra_context` (retrieved knowledge) is appended to the instructions part.
/// Throws std::invalid_argument for judgment and sampling kinds.
PromptParts assemble_task_prompt(TaskKind kind, const PromptConfig& config, const Transcript& history,
                                 const std::vector<embedding::Neighbor>& retrieved,
                                 std::string_view extra_context = {});

// ---------------------------------------------------------------------------
// Output parsing.

/// First nonempty line, trimmed and lowercased.
std::string parse_intent_output(std::string_view text);

/// The form of a `bot <form>` first line (lowercased). Throws MalformedStep.
std::string parse_next_step_output(std::string_view text);

/// First double-quoted string (with `\"` unescaped) if present, else the
/// trimmed text.
std::string parse_bot_message_output(std::string_view text);

// ---------------------------------------------------------------------------
// Generation tasks.

struct GenerationContext {
  LlmGateway& gateway;
  embedding::EmbeddingProvider& embedder;
  const embedding::IndexSet& indexes;
  const PromptConfig& prompts;
  embedding::RetrievalConfig retrieval;
  /// Optional retrieval filter, used by evaluation to hold out the record
  /// under test.
  std::function<bool(const embedding::IndexedItem&)> keep;
};

struct IntentResult {
  std::string form;  // matched defined form, or the raw output when unmatched
  bool matched = false;
  std::string raw;
  double score = 0.0;
  std::vector<embedding::Neighbor> retrieved;
};

/// knn over user examples -> prompt -> completion at intent temperature ->
/// parse -> similarity_match against `defined_forms`.
IntentResult generate_user_intent(GenerationContext& ctx, const Transcript& history,
                                  const std::vector<std::string>& defined_forms);

struct NextStepResult {
  std::string form;
  std::vector<embedding::Neighbor> retrieved;
};

/// Retrieval uses the last intent in `history`. Throws MalformedStep when the
/// model does not answer with a `bot` line.
NextStepResult generate_next_step(GenerationContext& ctx, const Transcript& history);

struct BotMessageResult {
  std::string text;
  std::string prompt;  // kept so consistency checks can resample it
};

BotMessageResult generate_bot_message(GenerationContext& ctx, const Transcript& history,
                                      std::string_view extra_context = {});

}  // namespace railgate::llm
