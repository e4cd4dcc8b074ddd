// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/runtime/events.hpp"

namespace railgate::runtime {

namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw std::invalid_argument(std::string("event is missing field '") + key + "'");
  return *it;
}

std::string text_field(const json& j, const char* key) {
  const json& f = field(j, key);
  if (!f.is_string()) throw std::invalid_argument(std::string("event field '") + key + "' must be a string");
  return f.get<std::string>();
}

}  // namespace

const char* event_type(const EventBody& body) {
  return std::visit(Overloaded{
                        [](const UtteranceUserActionFinished&) { return "UtteranceUserActionFinished"; },
                        [](const UserIntent&) { return "UserIntent"; },
                        [](const StartAction&) { return "StartAction"; },
                        [](const ActionFinished&) { return "ActionFinished"; },
                        [](const BotIntent&) { return "BotIntent"; },
                        [](const StartUtteranceBotAction&) { return "StartUtteranceBotAction"; },
                        [](const ContextUpdate&) { return "ContextUpdate"; },
                        [](const Listen&) { return "Listen"; },
                    },
                    body);
}

json event_to_json(const Event& event) {
  json j = {{"seq", event.seq}, {"type", event_type(event.body)}};
  std::visit(Overloaded{
                 [&](const UtteranceUserActionFinished& e) { j["text"] = e.text; },
                 [&](const UserIntent& e) {
                   j["form"] = e.form;
                   j["matched"] = e.matched;
                 },
                 [&](const StartAction& e) {
                   j["name"] = e.name;
                   json args = json::object();
                   for (const auto& [k, v] : e.args) args[k] = to_json(v);
                   j["args"] = args;
                 },
                 [&](const ActionFinished& e) {
                   j["name"] = e.name;
                   j["return_value"] = to_json(e.return_value);
                   j["status"] = e.status;
                 },
                 [&](const BotIntent& e) { j["form"] = e.form; },
                 [&](const StartUtteranceBotAction& e) { j["text"] = e.text; },
                 [&](const ContextUpdate& e) {
                   j["key"] = e.key;
                   j["value"] = to_json(e.value);
                 },
                 [](const Listen&) {},
             },
             event.body);
  return j;
}

Event event_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("event must be a JSON object");
  Event e;
  const json& seq = field(j, "seq");
  if (!seq.is_number_integer()) throw std::invalid_argument("event field 'seq' must be an integer");
  e.seq = seq.get<int64_t>();
  const std::string type = text_field(j, "type");
  if (type == "UtteranceUserActionFinished") {
    e.body = UtteranceUserActionFinished{text_field(j, "text")};
  } else if (type == "UserIntent") {
    const json& matched = field(j, "matched");
    if (!matched.is_boolean()) throw std::invalid_argument("event field 'matched' must be a boolean");
    e.body = UserIntent{text_field(j, "form"), matched.get<bool>()};
  } else if (type == "StartAction") {
    StartAction a{text_field(j, "name"), {}};
    const json& args = field(j, "args");
    if (!args.is_object()) throw std::invalid_argument("event field 'args' must be an object");
    for (auto it = args.begin(); it != args.end(); ++it) a.args[it.key()] = value_from_json(it.value());
    e.body = std::move(a);
  } else if (type == "ActionFinished") {
    e.body = ActionFinished{text_field(j, "name"), value_from_json(field(j, "return_value")), text_field(j, "status")};
  } else if (type == "BotIntent") {
    e.body = BotIntent{text_field(j, "form")};
  } else if (type == "StartUtteranceBotAction") {
    e.body = StartUtteranceBotAction{text_field(j, "text")};
  } else if (type == "ContextUpdate") {
    e.body = ContextUpdate{text_field(j, "key"), value_from_json(field(j, "value"))};
  } else if (type == "Listen") {
    e.body = Listen{};
  } else {
    throw std::invalid_argument("unknown event type '" + type + "'");
  }
  return e;
}

std::string to_jsonl(const std::vector<Event>& events) {
  std::string out;
  for (const auto& e : events) {
    out += event_to_json(e).dump();
    out += '\n';
  }
  return out;
}

std::vector<Event> from_jsonl(std::string_view text) {
  std::vector<Event> out;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(event_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

Context fold_context(const std::vector<Event>& history) {
  Context ctx;
  for (const auto& e : history) {
    if (const auto* u = std::get_if<ContextUpdate>(&e.body)) ctx[u->key] = u->value;
  }
  return ctx;
}

}  // namespace railgate::runtime
