// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/service/service.hpp"

#include <random>

#include "railgate/errors.hpp"

namespace railgate::service {

namespace {

std::string new_session_id() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  static const char* const kHex = "0123456789abcdef";
  std::string id;
  for (int part = 0; part < 2; ++part) {
    uint64_t v = rng();
    for (int i = 0; i < 16; ++i, v >>= 4) id.push_back(kHex[v & 0xf]);
  }
  return id;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

}  // namespace

SessionStore::SessionStore(std::chrono::seconds ttl, std::function<Clock::time_point()> now)
    : ttl_(ttl), now_(std::move(now)) {}

std::shared_ptr<Session> SessionStore::create(const std::string& config_id, runtime::DialogueState state) {
  auto s = std::make_shared<Session>();
  s->config_id = config_id;
  s->state = std::move(state);
  std::lock_guard lock(mu_);
  const auto now = now_();
  s->created_at = now;
  do {
    s->id = new_session_id();
  } while (sessions_.count(s->id));
  sessions_[s->id] = Entry{s, now};
  return s;
}

std::shared_ptr<Session> SessionStore::find(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  const auto now = now_();
  if (now - it->second.last_active > ttl_) {
    sessions_.erase(it);
    return nullptr;
  }
  it->second.last_active = now;
  return it->second.session;
}

size_t SessionStore::sweep() {
  std::lock_guard lock(mu_);
  const auto now = now_();
  return std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second.last_active > ttl_; });
}

size_t SessionStore::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

// ---------------------------------------------------------------------------

nlohmann::json verdict_to_json(const rails::RailVerdict& v) {
  nlohmann::json j{{"rail", rails::rail_name(v.rail)}, {"allowed", v.allowed}, {"raw_judgment", v.raw_judgment}};
  if (v.detail) j["detail"] = *v.detail;
  return j;
}

nlohmann::json trace_to_json(const runtime::TurnTrace& trace) {
  nlohmann::json j;
  j["user_intent"] = trace.user_intent.empty()
                         ? nlohmann::json(nullptr)
                         : nlohmann::json{{"form", trace.user_intent}, {"matched", trace.intent_matched}};
  j["decision"] = trace.decision.empty() ? nlohmann::json(nullptr) : nlohmann::json(trace.decision);
  j["rail_verdicts"] = nlohmann::json::array();
  for (const auto& v : trace.rail_verdicts) j["rail_verdicts"].push_back(verdict_to_json(v));
  j["llm_calls"] = nlohmann::json::array();
  for (const auto& c : trace.llm_calls) {
    j["llm_calls"].push_back({{"task", llm::task_kind_name(c.kind)},
                              {"temperature", c.temperature},
                              {"latency_ms", c.latency_ms},
                              {"ok", c.ok}});
  }
  j["events"] = nlohmann::json::array();
  for (const auto& e : trace.events) j["events"].push_back(runtime::event_to_json(e));
  if (trace.error) j["error"] = *trace.error;
  return j;
}

// ---------------------------------------------------------------------------

ChatService::ChatService(std::vector<App> apps, ServiceOptions options) : sessions_(options.session_ttl) {
  for (auto& app : apps) {
    const std::string id = app.config.id;
    if (!apps_.emplace(id, std::move(app)).second) throw ConfigError("duplicate config id '" + id + "'");
  }
}

std::vector<std::string> ChatService::config_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, app] : apps_) ids.push_back(id);
  return ids;
}

const App* ChatService::app(const std::string& id) const {
  auto it = apps_.find(id);
  return it == apps_.end() ? nullptr : &it->second;
}

ChatService::Response ChatService::error(int status, const std::string& message) {
  return Response{status, {{"error", {{"code", status}, {"message", message}}}}};
}

ChatService::Response ChatService::list_configs() const { return Response{200, {{"config_ids", config_ids()}}}; }

ChatService::Response ChatService::chat(const std::string& request_body) {
  nlohmann::json request;
  try {
    request = nlohmann::json::parse(request_body);
  } catch (const nlohmann::json::parse_error& e) {
    return error(400, std::string("request body is not JSON: ") + e.what());
  }
  return chat(request);
}

ChatService::Response ChatService::chat(const nlohmann::json& request) {
  if (!request.is_object()) return error(400, "request body must be a JSON object");
  for (const auto& [key, value] : request.items()) {
    if (key != "config_id" && key != "session_id" && key != "message" && key != "trace") {
      return error(400, "unknown field '" + key + "'");
    }
  }
  if (!request.contains("config_id") || !request["config_id"].is_string()) {
    return error(400, "config_id must be a string");
  }
  if (!request.contains("message") || !request["message"].is_string()) return error(400, "message must be a string");
  if (request.contains("session_id") && !request["session_id"].is_string() && !request["session_id"].is_null()) {
    return error(400, "session_id must be a string");
  }
  if (request.contains("trace") && !request["trace"].is_boolean()) return error(400, "trace must be a boolean");

  const std::string config_id = request["config_id"];
  const std::string message = request["message"];
  const bool want_trace = request.value("trace", false);
  const App* a = app(config_id);
  if (!a) return error(404, "unknown config '" + config_id + "'");
  if (blank(message)) return error(422, "message must not be empty");

  std::shared_ptr<Session> session;
  if (request.contains("session_id") && request["session_id"].is_string()) {
    session = sessions_.find(request["session_id"]);
    if (!session || session->config_id != config_id) {
      return error(404, "unknown session '" + request["session_id"].get<std::string>() + "'");
    }
  } else {
    session = sessions_.create(config_id, a->engine->new_session());
  }

  runtime::TurnResult result;
  {
    std::lock_guard lock(session->mu);
    result = a->engine->run_turn(session->state, message);
  }
  if (result.trace.error && a->engine->options().fallback_message.empty()) {
    return error(502, "model provider failed: " + *result.trace.error);
  }
  Response r{200, {{"session_id", session->id}, {"messages", result.messages}}};
  if (want_trace) r.body["trace"] = trace_to_json(result.trace);
  return r;
}

}  // namespace railgate::service
