// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/llm/gateway.hpp"

#include <chrono>
#include <future>

namespace railgate::llm {

namespace {

thread_local CallCapture* current_capture = nullptr;

}  // namespace

CallCapture::CallCapture() : previous_(current_capture) { current_capture = this; }

CallCapture::~CallCapture() { current_capture = previous_; }

std::string truncate_at_stop(std::string text, const std::vector<std::string>& stop) {
  size_t cut = text.size();
  for (const auto& s : stop) {
    if (s.empty()) continue;
    const size_t at = text.find(s);
    if (at < cut) cut = at;
  }
  text.resize(cut);
  return text;
}

LlmGateway::LlmGateway(std::shared_ptr<LlmProvider> provider, GatewaySettings settings)
    : provider_(std::move(provider)), settings_(std::move(settings)) {
  if (!provider_) throw std::invalid_argument("gateway needs a provider");
  if (settings_.max_retries < 0) throw std::invalid_argument("max_retries must be non-negative");
}

LlmTask LlmGateway::make_task(TaskKind kind, std::string prompt) const {
  LlmTask task;
  task.kind = kind;
  task.prompt = std::move(prompt);
  task.stop = settings_.stop;
  switch (kind) {
    case TaskKind::kGenerateUserIntent:
      task.temperature = settings_.intent_temperature;
      task.max_tokens = settings_.short_max_tokens;
      break;
    case TaskKind::kGenerateNextStep:
      task.temperature = settings_.next_step_temperature;
      task.max_tokens = settings_.short_max_tokens;
      break;
    case TaskKind::kGenerateBotMessage:
      task.temperature = settings_.bot_message_temperature;
      task.max_tokens = settings_.long_max_tokens;
      break;
    case TaskKind::kRailJudgment:
      task.temperature = settings_.judgment_temperature;
      task.max_tokens = settings_.long_max_tokens;
      break;
    case TaskKind::kSampleResponse:
      task.temperature = settings_.sample_temperature;
      task.max_tokens = settings_.long_max_tokens;
      break;
  }
  return task;
}

Completion LlmGateway::complete_uncaptured(const LlmTask& task, LlmCallRecord& record) {
  if (task.prompt.empty()) throw std::invalid_argument("LLM task prompt is empty");
  record = LlmCallRecord{task.kind, task.temperature, 0, false};
  const auto start = std::chrono::steady_clock::now();
  for (int attempt = 0;; ++attempt) {
    try {
      Completion c = provider_->complete(task);
      c.text = truncate_at_stop(std::move(c.text), task.stop);
      record.latency_ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
      record.ok = true;
      return c;
    } catch (const ProviderError& e) {
      if (!e.retryable() || attempt >= settings_.max_retries) {
        record.latency_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        throw;
      }
    }
  }
}

Completion LlmGateway::complete(const LlmTask& task) {
  LlmCallRecord record{task.kind, task.temperature, 0, false};
  CallCapture* capture = current_capture;
  try {
    Completion c = complete_uncaptured(task, record);
    if (capture) capture->calls_.push_back(record);
    return c;
  } catch (...) {
    if (capture) capture->calls_.push_back(record);
    throw;
  }
}

std::vector<std::string> LlmGateway::sample_n(const std::string& prompt, int n, std::optional<double> temperature) {
  if (n < 2) throw std::invalid_argument("sample_n needs n >= 2");
  LlmTask task = make_task(TaskKind::kSampleResponse, prompt);
  if (temperature) task.temperature = *temperature;
  std::vector<std::string> out(static_cast<size_t>(n));
  std::vector<LlmCallRecord> records(static_cast<size_t>(n));
  CallCapture* capture = current_capture;
  auto flush = [&](size_t count) {
    if (capture) capture->calls_.insert(capture->calls_.end(), records.begin(), records.begin() + count);
  };
  if (!provider_->order_independent()) {
    for (size_t i = 0; i < out.size(); ++i) {
      try {
        out[i] = complete_uncaptured(task, records[i]).text;
      } catch (...) {
        flush(i + 1);
        throw;
      }
    }
    flush(out.size());
    return out;
  }
  std::vector<std::future<std::string>> futures;
  for (size_t i = 0; i < out.size(); ++i) {
    futures.push_back(
        std::async(std::launch::async, [this, &task, &records, i] { return complete_uncaptured(task, records[i]).text; }));
  }
  std::exception_ptr failure;
  for (size_t i = 0; i < futures.size(); ++i) {
    try {
      out[i] = futures[i].get();
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  flush(out.size());
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace railgate::llm
