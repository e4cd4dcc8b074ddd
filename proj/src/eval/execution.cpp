// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>

#include "railgate/eval/eval.hpp"
#include "railgate/llm/gateway.hpp"
#include "railgate/service/service.hpp"

namespace railgate::eval {

using nlohmann::json;

namespace {

double ratio(int num, int den) { return den == 0 ? 0.0 : static_cast<double>(num) / den; }

bool judge_failed(const rails::RailVerdict& v) {
  return v.detail && (v.detail->rfind("judgment failed", 0) == 0 || v.detail->rfind("sampling failed", 0) == 0);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

const char* moderation_mode_name(ModerationMode mode) {
  switch (mode) {
    case ModerationMode::kInput: return "input";
    case ModerationMode::kOutput: return "output";
    case ModerationMode::kBoth: return "both";
  }
  return "?";
}

ModerationResult eval_moderation(const service::AppConfig& config, const service::ProviderOverrides& providers,
                                 const std::vector<LabelledPrompt>& prompts, ModerationMode mode) {
  ModerationResult result;
  ModerationMetrics& m = result.metrics;
  m.mode = mode;
  for (const auto& p : prompts) (p.harmful ? m.n_harmful : m.n_helpful)++;
  if (m.n_harmful == 0 || m.n_helpful == 0) throw std::invalid_argument("moderation needs harmful and helpful prompts");

  service::AppConfig cfg = config;
  cfg.rails.jailbreak = mode != ModerationMode::kOutput;
  cfg.rails.output_moderation = mode != ModerationMode::kInput;
  cfg.rails.fact_check = false;
  cfg.rails.hallucination = false;
  const service::App app = service::build_app(std::move(cfg), providers);

  for (size_t i = 0; i < prompts.size(); ++i) {
    const auto& p = prompts[i];
    json log{{"index", i}, {"prompt", p.prompt}, {"label", p.harmful ? "harmful" : "helpful"}};
    bool blocked = false;
    try {
      runtime::DialogueState state = app.engine->new_session();
      const runtime::TurnResult turn = app.engine->run_turn(state, p.prompt);
      json verdicts = json::array();
      for (const auto& v : turn.trace.rail_verdicts) {
        verdicts.push_back(service::verdict_to_json(v));
        blocked = blocked || !v.allowed;
      }
      log["rail_verdicts"] = verdicts;
      log["messages"] = turn.messages;
      if (turn.trace.error) {
        blocked = true;
        ++m.errors;
        log["error"] = *turn.trace.error;
      }
    } catch (const std::exception& e) {
      blocked = true;
      ++m.errors;
      log["error"] = e.what();
    }
    log["blocked"] = blocked;
    if (p.harmful && blocked) ++m.harmful_blocked;
    if (!p.harmful && !blocked) ++m.helpful_allowed;
    result.log.push_back(std::move(log));
  }
  m.harmful_blocked_rate = ratio(m.harmful_blocked, m.n_harmful);
  m.helpful_allowed_rate = ratio(m.helpful_allowed, m.n_helpful);
  return result;
}

FactCheckResult eval_factcheck(const RailSetup& setup, const std::vector<FactRecord>& records) {
  if (records.empty()) throw std::invalid_argument("fact-check set is empty");
  llm::LlmGateway gateway(setup.llm);
  FactCheckResult result;
  FactCheckMetrics& m = result.metrics;
  for (size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    json log{{"index", i}, {"question", r.question}, {"answer", r.answer}, {"label", r.label}};
    try {
      const rails::RailVerdict v = rails::check_facts(gateway, setup.rails.templates, r.context, r.answer);
      log["raw_judgment"] = v.raw_judgment;
      if (judge_failed(v)) {
        ++m.errors;
        log["error"] = *v.detail;
      } else {
        log["accepted"] = v.allowed;
        log["correct"] = v.allowed == r.label;
        if (r.label) (v.allowed ? m.true_positive : m.false_negative)++;
        else (v.allowed ? m.false_positive : m.true_negative)++;
      }
    } catch (const std::exception& e) {
      ++m.errors;
      log["error"] = e.what();
    }
    result.log.push_back(std::move(log));
  }
  const int positives = m.true_positive + m.false_negative;
  const int negatives = m.true_negative + m.false_positive;
  m.accuracy = ratio(m.true_positive + m.true_negative, positives + negatives);
  m.positive_accuracy = ratio(m.true_positive, positives);
  m.negative_accuracy = ratio(m.true_negative, negatives);
  return result;
}

std::vector<std::string> default_deflection_markers() {
  return {"I don't know", "I do not know", "cannot answer", "can't answer", "I'm not able to", "I am not able to",
          "false premise", "not aware of"};
}

HallucinationResult eval_hallucination(const RailSetup& setup, const std::vector<std::string>& questions,
                                       const std::vector<std::string>& deflection_markers) {
  if (questions.empty()) throw std::invalid_argument("question set is empty");
  llm::LlmGateway gateway(setup.llm);
  std::vector<std::string> markers;
  for (const auto& mk : deflection_markers) markers.push_back(lower(mk));
  HallucinationResult result;
  HallucinationMetrics& m = result.metrics;
  m.n_questions = static_cast<int>(questions.size());
  for (size_t i = 0; i < questions.size(); ++i) {
    json log{{"index", i}, {"question", questions[i]}};
    try {
      const llm::Transcript history{{llm::TranscriptLine::Kind::kUserSaid, questions[i]},
                                    {llm::TranscriptLine::Kind::kUserIntent, "ask question"},
                                    {llm::TranscriptLine::Kind::kBotIntent, "respond to question"}};
      const std::string prompt =
          llm::assemble_task_prompt(llm::TaskKind::kGenerateBotMessage, setup.prompts, history, {}).render();
      const std::string answer =
          llm::parse_bot_message_output(gateway.run(llm::TaskKind::kGenerateBotMessage, prompt).text);
      log["answer"] = answer;
      const std::string low = lower(answer);
      if (std::any_of(markers.begin(), markers.end(), [&](const std::string& mk) { return low.find(mk) != std::string::npos; })) {
        ++m.deflected;
        log["outcome"] = "deflected";
      } else {
        const rails::RailVerdict v =
            rails::check_hallucination(gateway, setup.rails.templates, prompt, answer, setup.rails.hallucination_config);
        log["raw_judgment"] = v.raw_judgment;
        if (v.detail) log["context"] = *v.detail;
        if (judge_failed(v)) {
          ++m.errors;
          log["error"] = *v.detail;
        } else {
          ++m.answered;
          if (!v.allowed) ++m.flagged;
          log["outcome"] = v.allowed ? "passed" : "flagged";
        }
      }
    } catch (const std::exception& e) {
      ++m.errors;
      log["error"] = e.what();
    }
    result.log.push_back(std::move(log));
  }
  m.intercepted_rate = ratio(m.flagged, m.answered);
  m.deflected_rate = ratio(m.deflected, m.deflected + m.answered);
  return result;
}

}  // namespace railgate::eval
