// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

// Execution rails: LLM-judged checks on user input and bot output.
//
// Each check renders a yes/no judgment prompt, asks the gateway at judgment
// temperature, and maps the answer through a fixed polarity:
//
//   rail               "yes"    "no"     anything else / error
//   fact_check         allow    block    block
//   hallucination      allow    flag     flag
//   jailbreak          block    allow    block
//   output_moderation  allow    block    block

#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "railgate/colang/ast.hpp"
#include "railgate/llm/gateway.hpp"
#include "railgate/rails/verdict.hpp"
#include "railgate/runtime/actions.hpp"

namespace railgate::rails {

enum class Judgment { kYes, kNo, kIndeterminate };

const char* judgment_name(Judgment judgment);

/// Lowercases and trims; a standalone "no" wins over a standalone "yes".
/// Words are maximal runs of letters, so "nothing" or "yesterday" count as
/// neither.
Judgment parse_yes_no(std::string_view text);

/// The fixed polarity table above.
bool allowed_by(Rail rail, Judgment judgment);

/// Judgment prompt templates with `{{name}}` (or `{{ name }}`) placeholders.
struct RailTemplates {
  std::string fact_check;         // {{evidence}}, {{bot_response}}
  std::string hallucination;      // {{sampled_responses}}, {{bot_response}}
  std::string jailbreak;          // {{user_input}}
  std::string output_moderation;  // {{bot_response}}

  static RailTemplates defaults();
};

/// Substitutes every placeholder; throws ConfigError naming an unknown one.
std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& values);

struct HallucinationConfig {
  int n_samples = 3;  // the original answer plus n_samples - 1 resamples
  double sample_temperature = 1.0;
};

// Provider failures become blocking (or flagging) verdicts with the error in
// `detail`. Empty inputs throw std::invalid_argument.

RailVerdict check_facts(llm::LlmGateway& gateway, const RailTemplates& templates, std::string_view evidence,
                        std::string_view bot_response);

/// Resamples `bot_prompt` n_samples - 1 times. The resamples, joined by ". ",
/// form the context; the original answer is the hypothesis.
RailVerdict check_hallucination(llm::LlmGateway& gateway, const RailTemplates& templates, std::string_view bot_prompt,
                                std::string_view bot_response, const HallucinationConfig& config);

RailVerdict check_jailbreak(llm::LlmGateway& gateway, const RailTemplates& templates, std::string_view user_input);

RailVerdict output_moderation(llm::LlmGateway& gateway, const RailTemplates& templates, std::string_view bot_response);

// ---------------------------------------------------------------------------
// Wiring into applications.

struct RailsConfig {
  bool fact_check = false;
  bool hallucination = false;
  bool jailbreak = false;
  bool output_moderation = false;
  HallucinationConfig hallucination_config;
  RailTemplates templates = RailTemplates::defaults();
  std::string refusal_message = "I'm sorry, I can't help with that request.";
  std::string hallucination_warning =
      "Please note that I am not fully confident in the answer above. It may contain inaccurate information.";
  std::string fact_check_deflection = "I'm sorry, I don't know the answer to that based on the information I have.";
};

/// Registers check_facts, check_hallucination, check_jailbreak and
/// output_moderation. Arguments override the context defaults:
/// user_input <- $last_user_message, bot_response <- $last_bot_message,
/// evidence <- $relevant_chunks, prompt <- $last_bot_prompt. Each call adds
/// its verdict to the turn trace and returns `allowed`.
void register_rail_actions(runtime::ActionRegistry& registry, std::shared_ptr<const RailsConfig> config);

/// Appends the wildcard flows for every enabled rail, plus the bot messages
/// they emit, unless the script already has a flow of the same name or one
/// that executes the rail's action. With `retrieve_knowledge` set, also adds
/// an input flow binding $relevant_chunks. Output rails are added in the order
/// moderation, fact check, hallucination. The fact and hallucination checks skip
/// predefined messages (no $last_bot_prompt).
void inject_rail_flows(colang::Script& script, const RailsConfig& config, bool retrieve_knowledge = false);

}  // namespace railgate::rails
