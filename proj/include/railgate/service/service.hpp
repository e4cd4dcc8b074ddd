// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

// Chat API independent of the transport.
//
//   GET  /v1/rails/configs -> {"config_ids": [...]}
//   POST /v1/chat  {"config_id", "session_id"?, "message", "trace"?}
//               -> {"session_id", "messages": [...], "trace"?}
//
// Errors are {"error": {"code": <status>, "message": ...}}: 400 malformed
// request, 404 unknown config or session, 422 empty message, 502 when a turn
// failed and no fallback message is configured.

#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "railgate/runtime/engine.hpp"
#include "railgate/service/config.hpp"

namespace railgate::service {

using Clock = std::chrono::steady_clock;

struct Session {
  std::string id;
  std::string config_id;
  Clock::time_point created_at;
  std::mutex mu;  // held for the whole turn
  runtime::DialogueState state;
};

/// In-memory sessions with an idle TTL. Thread-safe.
class SessionStore {
 public:
  explicit SessionStore(std::chrono::seconds ttl = std::chrono::minutes(30),
                        std::function<Clock::time_point()> now = Clock::now);

  std::shared_ptr<Session> create(const std::string& config_id, runtime::DialogueState state);
  /// Null when unknown or idle longer than the TTL; otherwise refreshes it.
  std::shared_ptr<Session> find(const std::string& id);
  /// Drops expired sessions; returns how many.
  size_t sweep();
  size_t size() const;

 private:
  struct Entry {
    std::shared_ptr<Session> session;
    Clock::time_point last_active;
  };

  std::chrono::seconds ttl_;
  std::function<Clock::time_point()> now_;
  mutable std::mutex mu_;
  std::map<std::string, Entry> sessions_;
};

nlohmann::json verdict_to_json(const rails::RailVerdict& v);
nlohmann::json trace_to_json(const runtime::TurnTrace& trace);

struct ServiceOptions {
  std::chrono::seconds session_ttl = std::chrono::minutes(30);
};

class ChatService {
 public:
  struct Response {
    int status = 200;
    nlohmann::json body;
  };

  /// Throws ConfigError on duplicate config ids.
  ChatService(std::vector<App> apps, ServiceOptions options = {});

  std::vector<std::string> config_ids() const;
  const App* app(const std::string& id) const;
  SessionStore& sessions() { return sessions_; }

  Response list_configs() const;
  Response chat(const std::string& request_body);
  Response chat(const nlohmann::json& request);

  static Response error(int status, const std::string& message);

 private:
  std::map<std::string, App> apps_;
  SessionStore sessions_;
};

}  // namespace railgate::service
