// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic intent data shaped like a banking NLU set, and the scripted
// models used to bound the topical evaluation.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "railgate/eval/eval.hpp"
#include "railgate/llm/mock.hpp"
#include "runtime_fixtures.hpp"

namespace railgate::testing {

/// 11 subjects x 7 topics = 77 intents with 4 to 6 utterances each.
inline eval::IntentDataset synthetic_banking(bool with_messages = true) {
  static const char* const kSubjects[] = {"card", "transfer", "account", "pin", "refund", "cash",
                                          "exchange", "statement", "loan", "wallet", "cheque"};
  static const char* const kTopics[] = {"arrival", "limit", "change", "problem", "cancel", "verify", "top_up"};
  static const char* const kTemplates[] = {
      "I have a question about my {s} {t}",  "Can you help with the {s} {t}?", "What about {t} for my {s}",
      "my {s} needs {t} help please",        "{s} {t} is confusing me",        "Tell me how {t} works on a {s}",
  };
  eval::IntentDataset data;
  int n = 0;
  for (const char* s : kSubjects) {
    for (const char* t : kTopics) {
      const std::string intent = std::string(s) + "_" + t;
      std::string topic = t;
      for (char& c : topic) c = c == '_' ? ' ' : c;
      const int count = 4 + (n++ % 3);
      for (int i = 0; i < count; ++i) {
        std::string u = kTemplates[i];
        u.replace(u.find("{s}"), 3, s);
        u.replace(u.find("{t}"), 3, topic);
        data.records.push_back({u, intent});
      }
      if (with_messages) data.bot_messages[intent] = "Here is what I know about " + std::string(s) + " " + topic + ".";
    }
  }
  return data;
}

/// utterance -> gold canonical form.
inline std::map<std::string, std::string> gold_forms(const eval::IntentDataset& data) {
  std::map<std::string, std::string> out;
  for (const auto& r : data.records) out[r.utterance] = eval::canonical_form(r.intent);
  return out;
}

/// Answers every intent query with the gold form.
inline std::shared_ptr<llm::LlmProvider> oracle_llm(const eval::IntentDataset& data) {
  auto gold = gold_forms(data);
  return std::make_shared<llm::FunctionLlm>([gold](const llm::LlmTask& task) -> std::string {
    if (task.kind == llm::TaskKind::kGenerateUserIntent) return gold.at(tail_utterance(task.prompt));
    throw std::logic_error("the oracle only classifies user intents");
  });
}

/// Answers every intent query with the form of the next intent in dataset
/// order, and every other query with something no flow defines.
inline std::shared_ptr<llm::LlmProvider> adversarial_llm(const eval::IntentDataset& data) {
  const auto intents = data.intents();
  std::map<std::string, std::string> wrong;
  for (size_t i = 0; i < intents.size(); ++i) {
    wrong[eval::canonical_form(intents[i])] = eval::canonical_form(intents[(i + 1) % intents.size()]);
  }
  auto gold = gold_forms(data);
  return std::make_shared<llm::FunctionLlm>([gold, wrong](const llm::LlmTask& task) -> std::string {
    switch (task.kind) {
      case llm::TaskKind::kGenerateUserIntent: return wrong.at(gold.at(tail_utterance(task.prompt)));
      case llm::TaskKind::kGenerateNextStep: return "bot say something unrelated";
      default: return "\"Something unrelated.\"";
    }
  });
}

/// Classifies correctly exactly when the gold form is among the few-shot
/// examples in the prompt; never proposes a next step of its own.
inline std::shared_ptr<llm::LlmProvider> retrieval_sensitive_llm(const eval::IntentDataset& data) {
  return std::make_shared<llm::FunctionLlm>([gold = gold_forms(data)](const llm::LlmTask& task) -> std::string {
    if (task.kind != llm::TaskKind::kGenerateUserIntent) return "bot say nothing";
    const std::string g = gold.at(tail_utterance(task.prompt));
    return task.prompt.find("\n  " + g + "\n") != std::string::npos ? g : "unknown request";
  });
}

inline std::string pluralize(const std::string& form) { return form + "s"; }

/// Near miss: the gold form with its last word pluralized.
inline std::shared_ptr<llm::LlmProvider> pluralizing_llm(const eval::IntentDataset& data) {
  return std::make_shared<llm::FunctionLlm>([gold = gold_forms(data)](const llm::LlmTask& task) -> std::string {
    if (task.kind == llm::TaskKind::kGenerateUserIntent) return pluralize(gold.at(tail_utterance(task.prompt)));
    if (task.kind == llm::TaskKind::kGenerateNextStep) return "bot respond vaguely";
    return "\"Vague.\"";
  });
}

/// Drops a trailing "s" from every word before hashing, so a pluralized
/// form embeds exactly like its singular.
class StemEmbedder : public embedding::EmbeddingProvider {
 public:
  std::string name() const override { return "stem"; }
  size_t dim() const override { return inner_.dim(); }
  embedding::EmbeddingVector embed(std::string_view text) override {
    std::string out, word;
    auto flush = [&] {
      if (word.size() > 1 && word.back() == 's') word.pop_back();
      if (!word.empty()) out += (out.empty() ? "" : " ") + word;
      word.clear();
    };
    for (char c : text) {
      if (c == ' ') flush();
      else word.push_back(c);
    }
    flush();
    return inner_.embed(out);
  }

 private:
  embedding::HashEmbedder inner_{128};
};

inline eval::TopicalSetup topical_setup(const eval::IntentDataset& data, std::shared_ptr<llm::LlmProvider> llm,
                                        std::shared_ptr<embedding::EmbeddingProvider> embedder = nullptr) {
  eval::TopicalSetup s;
  s.script = eval::build_topical_script(data);
  s.llm = std::move(llm);
  s.embedder = embedder ? std::move(embedder) : std::make_shared<embedding::HashEmbedder>(64);
  return s;
}

}  // namespace railgate::testing
