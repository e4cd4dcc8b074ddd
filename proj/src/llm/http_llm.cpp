// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/llm/http_llm.hpp"

#include <chrono>

#include "json.hpp"
#include "railgate/net/http_client.hpp"

namespace railgate::llm {

HttpLlm::HttpLlm(HttpLlmSettings settings) : settings_(std::move(settings)) {
  if (settings_.model.empty()) throw ConfigError("remote LLM provider needs a model name");
  net::parse_url(settings_.endpoint);
}

std::string HttpLlm::request_body(const LlmTask& task) const {
  nlohmann::json body = {
      {"model", settings_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", task.prompt}}})},
      {"temperature", task.temperature},
      {"max_tokens", task.max_tokens},
  };
  if (!task.stop.empty()) body["stop"] = task.stop;
  return body.dump();
}

Completion HttpLlm::complete(const LlmTask& task) {
  std::vector<std::pair<std::string, std::string>> headers;
  if (!settings_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + settings_.api_key);
  const auto start = std::chrono::steady_clock::now();
  auto res = net::post_json(net::parse_url(settings_.endpoint), request_body(task), headers, settings_.timeout);
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  if (res.status < 200 || res.status >= 300) {
    throw ProviderError("LLM request failed with HTTP " + std::to_string(res.status),
                        net::is_retryable_status(res.status), res.status);
  }
  Completion out;
  out.provider_name = name();
  out.latency_ms = elapsed;
  try {
    auto doc = nlohmann::json::parse(res.body);
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    out.text = content.is_null() ? "" : content.get<std::string>();
    if (doc.contains("usage") && doc["usage"].is_object()) {
      const auto& u = doc["usage"];
      out.token_counts = TokenCounts{u.value("prompt_tokens", 0), u.value("completion_tokens", 0)};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed LLM response: ") + e.what(), false, res.status);
  }
  return out;
}

}  // namespace railgate::llm
