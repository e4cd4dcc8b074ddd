// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

// Dialogue events. JSON form: {"seq": n, "type": "<TypeName>", ...payload},
// e.g. {"seq": 3, "type": "UserIntent", "form": "express greeting",
// "matched": true}. Histories are stored as JSON Lines.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "railgate/runtime/value.hpp"

namespace railgate::runtime {

struct UtteranceUserActionFinished {
  std::string text;
  bool operator==(const UtteranceUserActionFinished&) const = default;
};
struct UserIntent {
  std::string form;
  bool matched = true;
  bool operator==(const UserIntent&) const = default;
};
struct StartAction {
  std::string name;
  std::map<std::string, Value> args;
  bool operator==(const StartAction&) const = default;
};
struct ActionFinished {
  std::string name;
  Value return_value;
  std::string status;  // "success" or "failed"
  bool operator==(const ActionFinished&) const = default;
};
struct BotIntent {
  std::string form;
  bool operator==(const BotIntent&) const = default;
};
struct StartUtteranceBotAction {
  std::string text;
  bool operator==(const StartUtteranceBotAction&) const = default;
};
struct ContextUpdate {
  std::string key;
  Value value;
  bool operator==(const ContextUpdate&) const = default;
};
struct Listen {
  bool operator==(const Listen&) const = default;
};

using EventBody = std::variant<UtteranceUserActionFinished, UserIntent, StartAction, ActionFinished, BotIntent,
                               StartUtteranceBotAction, ContextUpdate, Listen>;

struct Event {
  int64_t seq = 0;
  EventBody body;
  bool operator==(const Event&) const = default;
};

const char* event_type(const EventBody& body);

nlohmann::json event_to_json(const Event& event);
/// Throws std::invalid_argument on unknown types or missing fields.
Event event_from_json(const nlohmann::json& j);

std::string to_jsonl(const std::vector<Event>& events);
/// Blank lines are skipped. Errors name the offending line.
std::vector<Event> from_jsonl(std::string_view text);

/// Folds ContextUpdate events in order.
Context fold_context(const std::vector<Event>& history);

}  // namespace railgate::runtime
