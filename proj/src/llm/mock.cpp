// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/llm/mock.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

namespace railgate::llm {

namespace {

struct KindName {
  TaskKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {TaskKind::kGenerateUserIntent, "generate_user_intent"},
    {TaskKind::kGenerateNextStep, "generate_next_step"},
    {TaskKind::kGenerateBotMessage, "generate_bot_message"},
    {TaskKind::kRailJudgment, "rail_judgment"},
    {TaskKind::kSampleResponse, "sample_response"},
};

std::string_view last_nonempty_line(std::string_view text) {
  size_t end = text.size();
  while (end > 0) {
    const size_t start = text.rfind('\n', end - 1);
    const size_t from = start == std::string_view::npos ? 0 : start + 1;
    std::string_view line = text.substr(from, end - from);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) return line;
    if (start == std::string_view::npos) break;
    end = start;
  }
  return {};
}

bool rule_matches(const MockRule& rule, const LlmTask& task) {
  if (rule.task_kind && *rule.task_kind != task.kind) return false;
  if (rule.matcher.empty()) return true;
  const std::string_view haystack =
      rule.scope == MockRule::Scope::kTail ? last_nonempty_line(task.prompt) : std::string_view(task.prompt);
  return haystack.find(rule.matcher) != std::string_view::npos;
}

MockRule rule_from_yaml(const YAML::Node& node, size_t index) {
  const std::string where = "mock rule " + std::to_string(index + 1);
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  MockRule rule;
  if (node["task"]) {
    const auto name = node["task"].as<std::string>();
    if (name != "any") {
      rule.task_kind = parse_task_kind(name);
      if (!rule.task_kind) throw ConfigError(where + ": unknown task kind '" + name + "'");
    }
  }
  if (node["match"]) rule.matcher = node["match"].as<std::string>();
  if (node["scope"]) {
    const auto scope = node["scope"].as<std::string>();
    if (scope == "tail") {
      rule.scope = MockRule::Scope::kTail;
    } else if (scope != "prompt") {
      throw ConfigError(where + ": scope must be 'prompt' or 'tail'");
    }
  }
  if (node["response"]) rule.responses.push_back(node["response"].as<std::string>());
  if (node["responses"]) {
    for (const auto& r : node["responses"]) rule.responses.push_back(r.as<std::string>());
  }
  if (rule.responses.empty()) throw ConfigError(where + ": needs 'response' or 'responses'");
  if (node["once"]) rule.consume_once = node["once"].as<bool>();
  return rule;
}

}  // namespace

const char* task_kind_name(TaskKind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  return "?";
}

std::optional<TaskKind> parse_task_kind(std::string_view name) {
  for (const auto& k : kKindNames) {
    if (name == k.name) return k.kind;
  }
  return std::nullopt;
}

MockLlm::MockLlm(std::vector<MockRule> rules) {
  for (auto& r : rules) add_rule(std::move(r));
}

std::vector<MockRule> MockLlm::parse_rules(const std::string& document) {
  YAML::Node root;
  try {
    root = YAML::Load(document);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("mock rules: ") + e.what());
  }
  if (root.IsMap() && root["rules"]) root = root["rules"];
  if (root.IsNull()) return {};
  if (!root.IsSequence()) throw ConfigError("mock rules: expected a list of rules");
  std::vector<MockRule> rules;
  try {
    for (size_t i = 0; i < root.size(); ++i) rules.push_back(rule_from_yaml(root[i], i));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("mock rules: ") + e.what());
  }
  return rules;
}

std::vector<MockRule> MockLlm::load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read mock rules file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_rules(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void MockLlm::add_rule(MockRule rule) {
  if (rule.responses.empty()) throw std::invalid_argument("mock rule needs at least one response");
  std::lock_guard lock(mu_);
  slots_.push_back(Slot{std::move(rule)});
}

Completion MockLlm::complete(const LlmTask& task) {
  std::lock_guard lock(mu_);
  for (size_t i = 0; i < slots_.size(); ++i) {
    Slot& slot = slots_[i];
    if (slot.spent || !rule_matches(slot.rule, task)) continue;
    std::string text = slot.rule.responses[slot.next % slot.rule.responses.size()];
    ++slot.next;
    if (slot.rule.consume_once) slot.spent = true;
    calls_.push_back(
        MockCall{task.kind, task.prompt, task.temperature, task.stop, task.max_tokens, text, static_cast<int>(i)});
    return Completion{std::move(text), name(), 0, std::nullopt};
  }
  std::string tail(last_nonempty_line(task.prompt));
  throw NoMatchingRule(std::string("mock LLM has no rule for ") + task_kind_name(task.kind) + " (prompt ends with: " +
                       tail + ")");
}

std::vector<MockCall> MockLlm::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

size_t MockLlm::call_count() const {
  std::lock_guard lock(mu_);
  return calls_.size();
}

void MockLlm::clear_calls() {
  std::lock_guard lock(mu_);
  calls_.clear();
}

}  // namespace railgate::llm
