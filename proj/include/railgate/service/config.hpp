// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

// Application directories: one `config.yml` plus any number of `.co` files.
//
//   id: jobs                      # defaults to the directory name
//   model:
//     kind: mock                  # mock | openai
//     rules: mock_rules.yml       # mock only
//     endpoint: https://api.example.com/v1/chat/completions
//     name: some-model
//     template: default           # prompt template name, see below
//     timeout_ms: 60000
//   embedding:
//     kind: hash                  # hash | openai
//     dim: 256
//   instructions: |               # overrides the template's instructions
//     ...
//   sample_conversation: |        # overrides the template's sample
//     ...
//   retrieval: {k: 5, similarity_threshold: 0.6, max_per_form: 3}
//   rails:
//     jailbreak: true
//     output_moderation: true
//     fact_check: true
//     hallucination: {enabled: true, n_samples: 3, sample_temperature: 1.0}
//     messages: {refusal: ..., hallucination_warning: ..., fact_check_deflection: ...}
//     templates: {jailbreak: prompts/jailbreak.txt}
//   knowledge_base:
//     - An inline chunk.
//     - file: kb/report.md        # split into blank-line separated chunks
//   stub_actions:
//     wolfram_alpha_request: "42"
//   fallback_message: I'm sorry, I can't respond right now.
//   event_budget: 100
//
// Prompt template `default` is built in; any other name loads
// `prompts/<name>.yml` with keys general_instructions and sample_conversation.
// API keys come from RAILGATE_LLM_API_KEY and RAILGATE_EMBEDDINGS_API_KEY.

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "railgate/colang/ast.hpp"
#include "railgate/colang/diagnostic.hpp"
#include "railgate/embedding/embedding.hpp"
#include "railgate/embedding/index.hpp"
#include "railgate/llm/prompts.hpp"
#include "railgate/llm/provider.hpp"
#include "railgate/rails/rails.hpp"
#include "railgate/runtime/engine.hpp"

namespace railgate::service {

struct ModelSettings {
  std::string kind = "mock";
  std::filesystem::path rules;
  std::string endpoint;
  std::string name;
  std::string prompt_template = "default";
  int timeout_ms = 60000;
};

struct EmbeddingSettings {
  std::string kind = "hash";
  size_t dim = 256;
  std::string endpoint;
  std::string name;
  int timeout_ms = 30000;
};

struct AppConfig {
  std::string id;
  std::filesystem::path dir;
  std::vector<std::string> colang_files;  // lexicographic
  colang::Script script;                  // merged user script, before rail flows are added
  std::vector<colang::Diagnostic> warnings;
  llm::PromptConfig prompts;
  ModelSettings model;
  EmbeddingSettings embedding;
  embedding::RetrievalConfig retrieval;
  rails::RailsConfig rails;
  std::vector<std::string> knowledge_base;
  std::map<std::string, runtime::Value> stub_actions;
  runtime::EngineOptions engine;
};

/// Parses and validates an application directory. Throws ConfigError listing
/// `file:line` diagnostics.
AppConfig load_config(const std::filesystem::path& dir);

/// Replace the configured providers, e.g. with mocks in tests.
struct ProviderOverrides {
  std::shared_ptr<llm::LlmProvider> llm;
  std::shared_ptr<embedding::EmbeddingProvider> embedder;
};

struct App {
  AppConfig config;
  std::shared_ptr<llm::LlmProvider> llm;
  std::shared_ptr<const runtime::Engine> engine;
};

/// The providers a config describes. API keys come from the environment.
std::shared_ptr<llm::LlmProvider> make_llm(const AppConfig& config);
std::shared_ptr<embedding::EmbeddingProvider> make_embedder(const AppConfig& config);

/// Creates providers, registers built-in, rail and stub actions, injects rail
/// flows, and builds the engine (and with it every retrieval index).
App build_app(AppConfig config, const ProviderOverrides& overrides = {});

inline App load_app(const std::filesystem::path& dir, const ProviderOverrides& overrides = {}) {
  return build_app(load_config(dir), overrides);
}

/// `root` itself when it holds a config.yml, else every immediate
/// subdirectory that does, sorted by name.
std::vector<std::filesystem::path> find_app_dirs(const std::filesystem::path& root);

}  // namespace railgate::service
