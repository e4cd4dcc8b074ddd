// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

// Offline evaluation of topical and execution rails.
//
// Topical: every record is classified with the three generation stages (user
// canonical form, next step, bot message) while that record is held out of
// the few-shot index. Moderation, fact checking and hallucination run the
// corresponding rails over labelled sets. Every evaluation returns its metrics
// plus a per-record JSON log in record order.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "railgate/colang/ast.hpp"
#include "railgate/embedding/embedding.hpp"
#include "railgate/llm/prompts.hpp"
#include "railgate/llm/provider.hpp"
#include "railgate/rails/rails.hpp"
#include "railgate/service/config.hpp"

namespace railgate::eval {

// ---------------------------------------------------------------------------
// Datasets

struct IntentRecord {
  std::string utterance;
  std::string intent;
};

struct IntentDataset {
  std::vector<IntentRecord> records;
  std::map<std::string, std::string> bot_messages;  // optional gold reply per intent

  /// Distinct intents in order of first appearance.
  std::vector<std::string> intents() const;
};

/// CSV with header `utterance,intent` or `utterance,intent,bot_message`.
/// Fields may be double-quoted ("" escapes a quote). Throws ConfigError with
/// `source:line` on any malformed row, blank field or conflicting bot message.
IntentDataset parse_intent_csv(const std::string& text, const std::string& source = "<csv>");
IntentDataset load_intent_csv(const std::filesystem::path& path);

/// At most `max_per_intent` records per intent, drawn uniformly with a
/// generator seeded by `seed`. Output order: intents in first-appearance order,
/// then records in the order they were drawn. Throws std::invalid_argument
/// when max_per_intent < 1.
IntentDataset balance_dataset(const IntentDataset& dataset, int max_per_intent, uint32_t seed);

struct LabelledPrompt {
  std::string prompt;
  bool harmful = false;
};

/// JSONL: {"prompt": text, "label": "harmful" | "helpful"}.
std::vector<LabelledPrompt> parse_prompt_set(const std::string& jsonl, const std::string& source = "<jsonl>");

struct FactRecord {
  std::string context;
  std::string question;
  std::string answer;
  bool label = true;  // answer supported by the context
};

/// JSONL: {"context", "question", "answer", "label": bool}; the three text
/// fields follow the MSMARCO (context, question, answer) layout.
std::vector<FactRecord> parse_fact_records(const std::string& jsonl, const std::string& source = "<jsonl>");

/// JSONL: {"question": text}.
std::vector<std::string> parse_questions(const std::string& jsonl, const std::string& source = "<jsonl>");

/// Twenty questions resting on a false premise.
const std::vector<std::string>& default_false_premise_questions();

std::string read_text(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Topical rails

/// "card_arrival" -> "card arrival": lowercase, '_' and '-' become spaces,
/// runs of spaces collapse.
std::string canonical_form(const std::string& intent);

/// One `define user` per intent holding its utterances, one two-step flow
/// `user <form>` / `bot respond to <form>` per intent, and a `define bot` for
/// every gold bot message.
colang::Script build_topical_script(const IntentDataset& dataset);

struct TopicalSetup {
  colang::Script script;
  llm::PromptConfig prompts = llm::PromptConfig::defaults();
  std::shared_ptr<llm::LlmProvider> llm;
  std::shared_ptr<embedding::EmbeddingProvider> embedder;
};

struct TopicalOptions {
  int k = 3;                         // few-shot examples per prompt; 0 disables retrieval
  std::optional<double> threshold;  // similarity matching for stage 1; unset means exact
  uint32_t seed = 42;               // echoed in the report
  int workers = 1;                  // >1 only takes effect with order-independent providers
};

struct TopicalMetrics {
  double user_intent_acc = 0.0;
  double bot_intent_acc = 0.0;
  std::optional<double> bot_message_acc;  // only when gold bot messages exist
  int n_samples = 0;
  int n_intents = 0;
  int user_intent_correct = 0;
  int bot_intent_correct = 0;
  int bot_message_correct = 0;
  int errors = 0;
  TopicalOptions settings;
};

struct TopicalResult {
  TopicalMetrics metrics;
  std::vector<nlohmann::json> log;
};

/// Throws ConfigError when a dataset intent has no defined user form or no
/// flow answering it.
TopicalResult eval_topical(const TopicalSetup& setup, const IntentDataset& dataset, const TopicalOptions& options);

// ---------------------------------------------------------------------------
// Execution rails

enum class ModerationMode { kInput, kOutput, kBoth };

const char* moderation_mode_name(ModerationMode mode);

struct ModerationMetrics {
  ModerationMode mode = ModerationMode::kBoth;
  double harmful_blocked_rate = 0.0;
  double helpful_allowed_rate = 0.0;
  int n_harmful = 0;
  int n_helpful = 0;
  int harmful_blocked = 0;
  int helpful_allowed = 0;
  int errors = 0;  // counted as blocked
};

struct ModerationResult {
  ModerationMetrics metrics;
  std::vector<nlohmann::json> log;
};

/// Sends every prompt through a full turn of `config` with only the rails of
/// `mode` enabled. A turn is blocked when any rail verdict disallows it or the
/// turn failed. Throws std::invalid_argument on an empty set.
ModerationResult eval_moderation(const service::AppConfig& config, const service::ProviderOverrides& providers,
                                 const std::vector<LabelledPrompt>& prompts, ModerationMode mode);

/// A judge model plus the rail settings (templates, sampling) to use with it.
struct RailSetup {
  std::shared_ptr<llm::LlmProvider> llm;
  rails::RailsConfig rails;
  llm::PromptConfig prompts = llm::PromptConfig::defaults();  // for the hallucination base answer
};

struct FactCheckMetrics {
  double accuracy = 0.0;
  double positive_accuracy = 0.0;
  double negative_accuracy = 0.0;
  int true_positive = 0;   // supported and accepted
  int true_negative = 0;   // unsupported and rejected
  int false_positive = 0;  // unsupported but accepted
  int false_negative = 0;  // supported but rejected
  int errors = 0;          // excluded from every rate
};

struct FactCheckResult {
  FactCheckMetrics metrics;
  std::vector<nlohmann::json> log;
};

FactCheckResult eval_factcheck(const RailSetup& setup, const std::vector<FactRecord>& records);

struct HallucinationMetrics {
  double intercepted_rate = 0.0;  // flagged / answered
  double deflected_rate = 0.0;    // deflected / (answered + deflected)
  int n_questions = 0;
  int deflected = 0;
  int answered = 0;
  int flagged = 0;
  int errors = 0;  // excluded
};

struct HallucinationResult {
  HallucinationMetrics metrics;
  std::vector<nlohmann::json> log;
};

std::vector<std::string> default_deflection_markers();

/// Asks each question through the bot-message prompt; deflections (any marker,
/// case-insensitive) are counted apart, every other answer goes through the
/// self-consistency check.
HallucinationResult eval_hallucination(const RailSetup& setup, const std::vector<std::string>& questions,
                                       const std::vector<std::string>& deflection_markers = default_deflection_markers());

// ---------------------------------------------------------------------------
// Reports

enum class ReportFormat { kTable, kJson };

/// One table row: exact-match and similarity-match runs of one setting.
struct TopicalRow {
  std::string label;
  TopicalMetrics exact;
  std::optional<TopicalMetrics> sim;
};

nlohmann::json topical_json(const std::vector<TopicalRow>& rows);
nlohmann::json moderation_json(const std::vector<ModerationMetrics>& runs);
nlohmann::json factcheck_json(const FactCheckMetrics& m);
nlohmann::json hallucination_json(const HallucinationMetrics& m);

/// Renders a document produced by one of the *_json functions. Tables use
/// three decimals and "N/A" for missing values.
std::string report(const nlohmann::json& doc, ReportFormat format);

/// One JSON object per line.
std::string to_jsonl(const std::vector<nlohmann::json>& log);

}  // namespace railgate::eval
