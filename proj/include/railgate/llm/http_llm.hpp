// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <string>

#include "railgate/llm/provider.hpp"

namespace railgate::llm {

struct HttpLlmSettings {
  std::string endpoint;  // full URL of the chat-completions route
  std::string model;
  std::string api_key;  // "Authorization: Bearer <key>" when set
  std::chrono::milliseconds timeout{60000};
};

/// Chat-completions client. The prompt is sent as a single user message;
/// temperature, stop and max_tokens are forwarded unchanged. The answer is
/// choices[0].message.content.
class HttpLlm : public LlmProvider {
 public:
  explicit HttpLlm(HttpLlmSettings settings);

  std::string name() const override { return "http:" + settings_.model; }
  Completion complete(const LlmTask& task) override;

  /// Request body for `task`, exposed for tests.
  std::string request_body(const LlmTask& task) const;

 private:
  HttpLlmSettings settings_;
};

}  // namespace railgate::llm
