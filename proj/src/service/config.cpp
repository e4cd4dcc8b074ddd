// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/service/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "railgate/colang/format.hpp"
#include "railgate/colang/parser.hpp"
#include "railgate/errors.hpp"
#include "railgate/llm/http_llm.hpp"
#include "railgate/llm/mock.hpp"

namespace railgate::service {

namespace fs = std::filesystem;

namespace {

/// Reads one YAML document, reporting errors as `file:line: message`.
class Reader {
 public:
  explicit Reader(std::string file) : file_(std::move(file)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
    const int line = node.Mark().line >= 0 ? node.Mark().line + 1 : 0;
    throw ConfigError(file_ + ":" + std::to_string(line) + ": " + message);
  }

  void expect_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) const {
    if (!map.IsMap()) fail(map, where + " must be a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }

  std::string text(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be text");
    return node.as<std::string>();
  }

  template <class T>
  T scalar(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, what + " has the wrong type");
    }
  }

  const std::string& file() const { return file_; }

 private:
  std::string file_;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

YAML::Node load_yaml(const fs::path& path) {
  try {
    return YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw ConfigError(path.string() + ": cannot read file");
  } catch (const YAML::Exception& e) {
    throw ConfigError(path.string() + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

std::vector<std::string> split_paragraphs(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  std::istringstream in(text);
  std::string line;
  auto flush = [&] {
    const size_t b = current.find_first_not_of(" \t\r\n");
    if (b != std::string::npos) {
      const size_t e = current.find_last_not_of(" \t\r\n");
      out.push_back(current.substr(b, e - b + 1));
    }
    current.clear();
  };
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      flush();
    } else {
      if (!current.empty()) current += '\n';
      current += line;
    }
  }
  flush();
  return out;
}

llm::PromptConfig load_prompt_template(const fs::path& dir, const std::string& name) {
  if (name == "default") return llm::PromptConfig::defaults();
  const fs::path path = dir / "prompts" / (name + ".yml");
  if (!fs::exists(path)) throw ConfigError(path.string() + ": prompt template '" + name + "' not found");
  const YAML::Node doc = load_yaml(path);
  Reader r(path.string());
  r.expect_keys(doc, {"general_instructions", "sample_conversation"}, "prompt template");
  llm::PromptConfig p{"", ""};
  if (doc["general_instructions"]) p.general_instructions = r.text(doc["general_instructions"], "general_instructions");
  if (doc["sample_conversation"]) p.sample_conversation = r.text(doc["sample_conversation"], "sample_conversation");
  return p;
}

void read_model(const Reader& r, const YAML::Node& node, const fs::path& dir, ModelSettings& m) {
  r.expect_keys(node, {"kind", "rules", "endpoint", "name", "template", "timeout_ms"}, "model");
  if (node["kind"]) m.kind = r.text(node["kind"], "model.kind");
  if (m.kind != "mock" && m.kind != "openai") r.fail(node["kind"], "model.kind must be mock or openai");
  if (node["rules"]) m.rules = dir / r.text(node["rules"], "model.rules");
  if (node["endpoint"]) m.endpoint = r.text(node["endpoint"], "model.endpoint");
  if (node["name"]) m.name = r.text(node["name"], "model.name");
  if (node["template"]) m.prompt_template = r.text(node["template"], "model.template");
  if (node["timeout_ms"]) m.timeout_ms = r.scalar<int>(node["timeout_ms"], "model.timeout_ms");
  if (m.kind == "mock" && m.rules.empty()) r.fail(node, "a mock model needs a rules file");
  if (m.kind == "openai" && (m.endpoint.empty() || m.name.empty())) r.fail(node, "model needs endpoint and name");
}

void read_embedding(const Reader& r, const YAML::Node& node, EmbeddingSettings& e) {
  r.expect_keys(node, {"kind", "dim", "endpoint", "name", "timeout_ms"}, "embedding");
  if (node["kind"]) e.kind = r.text(node["kind"], "embedding.kind");
  if (e.kind != "hash" && e.kind != "openai") r.fail(node["kind"], "embedding.kind must be hash or openai");
  if (node["dim"]) {
    const int dim = r.scalar<int>(node["dim"], "embedding.dim");
    if (dim < 1) r.fail(node["dim"], "embedding.dim must be positive");
    e.dim = static_cast<size_t>(dim);
  }
  if (node["endpoint"]) e.endpoint = r.text(node["endpoint"], "embedding.endpoint");
  if (node["name"]) e.name = r.text(node["name"], "embedding.name");
  if (node["timeout_ms"]) e.timeout_ms = r.scalar<int>(node["timeout_ms"], "embedding.timeout_ms");
  if (e.kind == "openai" && (e.endpoint.empty() || e.name.empty())) r.fail(node, "embedding needs endpoint and name");
}

void read_retrieval(const Reader& r, const YAML::Node& node, embedding::RetrievalConfig& c) {
  r.expect_keys(node, {"k", "similarity_threshold", "max_per_form"}, "retrieval");
  if (node["k"]) {
    c.k_examples = r.scalar<int>(node["k"], "retrieval.k");
    if (c.k_examples < 0) r.fail(node["k"], "retrieval.k must not be negative");
  }
  if (const YAML::Node t = node["similarity_threshold"]) {
    if (t.IsNull()) {
      c.similarity_threshold.reset();
    } else {
      const double v = r.scalar<double>(t, "retrieval.similarity_threshold");
      if (v < 0.0 || v > 1.0) r.fail(t, "retrieval.similarity_threshold must be within [0, 1]");
      c.similarity_threshold = v;
    }
  }
  if (node["max_per_form"]) {
    const int v = r.scalar<int>(node["max_per_form"], "retrieval.max_per_form");
    if (v < 1) r.fail(node["max_per_form"], "retrieval.max_per_form must be positive");
    c.max_per_form = v;
  }
}

void read_rails(const Reader& r, const YAML::Node& node, const fs::path& dir, rails::RailsConfig& c) {
  r.expect_keys(node, {"jailbreak", "output_moderation", "fact_check", "hallucination", "messages", "templates"},
                "rails");
  if (node["jailbreak"]) c.jailbreak = r.scalar<bool>(node["jailbreak"], "rails.jailbreak");
  if (node["output_moderation"]) c.output_moderation = r.scalar<bool>(node["output_moderation"], "rails.output_moderation");
  if (node["fact_check"]) c.fact_check = r.scalar<bool>(node["fact_check"], "rails.fact_check");
  if (const YAML::Node h = node["hallucination"]) {
    if (h.IsScalar()) {
      c.hallucination = r.scalar<bool>(h, "rails.hallucination");
    } else {
      r.expect_keys(h, {"enabled", "n_samples", "sample_temperature"}, "rails.hallucination");
      c.hallucination = h["enabled"] ? r.scalar<bool>(h["enabled"], "rails.hallucination.enabled") : true;
      if (h["n_samples"]) c.hallucination_config.n_samples = r.scalar<int>(h["n_samples"], "n_samples");
      if (c.hallucination_config.n_samples < 2) r.fail(h, "rails.hallucination.n_samples must be at least 2");
      if (h["sample_temperature"]) {
        c.hallucination_config.sample_temperature = r.scalar<double>(h["sample_temperature"], "sample_temperature");
      }
    }
  }
  if (const YAML::Node m = node["messages"]) {
    r.expect_keys(m, {"refusal", "hallucination_warning", "fact_check_deflection"}, "rails.messages");
    if (m["refusal"]) c.refusal_message = r.text(m["refusal"], "refusal");
    if (m["hallucination_warning"]) c.hallucination_warning = r.text(m["hallucination_warning"], "hallucination_warning");
    if (m["fact_check_deflection"]) c.fact_check_deflection = r.text(m["fact_check_deflection"], "fact_check_deflection");
  }
  if (const YAML::Node t = node["templates"]) {
    r.expect_keys(t, {"fact_check", "hallucination", "jailbreak", "output_moderation"}, "rails.templates");
    auto load = [&](const char* key, std::string& slot) {
      if (t[key]) slot = read_file(dir / r.text(t[key], key));
    };
    load("fact_check", c.templates.fact_check);
    load("hallucination", c.templates.hallucination);
    load("jailbreak", c.templates.jailbreak);
    load("output_moderation", c.templates.output_moderation);
  }
}

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

}  // namespace

AppConfig load_config(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError(dir.string() + ": not a directory");
  const fs::path config_path = dir / "config.yml";
  if (!fs::exists(config_path)) throw ConfigError(config_path.string() + ": missing config.yml");
  AppConfig cfg;
  cfg.dir = dir;
  cfg.id = fs::absolute(dir).lexically_normal().filename().string();
  if (cfg.id.empty()) cfg.id = fs::absolute(dir).lexically_normal().parent_path().filename().string();

  YAML::Node doc = load_yaml(config_path);
  if (doc.IsNull()) doc = YAML::Node(YAML::NodeType::Map);
  const Reader r(config_path.string());
  r.expect_keys(doc,
                {"id", "model", "embedding", "instructions", "sample_conversation", "retrieval", "rails",
                 "knowledge_base", "stub_actions", "fallback_message", "event_budget"},
                "config.yml");

  if (doc["id"]) cfg.id = r.text(doc["id"], "id");
  if (!doc["model"]) throw ConfigError(config_path.string() + ": no model configured");
  read_model(r, doc["model"], dir, cfg.model);
  if (doc["embedding"]) read_embedding(r, doc["embedding"], cfg.embedding);
  cfg.prompts = load_prompt_template(dir, cfg.model.prompt_template);
  if (doc["instructions"]) cfg.prompts.general_instructions = r.text(doc["instructions"], "instructions");
  if (doc["sample_conversation"]) {
    cfg.prompts.sample_conversation = r.text(doc["sample_conversation"], "sample_conversation");
  }
  if (doc["retrieval"]) read_retrieval(r, doc["retrieval"], cfg.retrieval);
  if (doc["rails"]) read_rails(r, doc["rails"], dir, cfg.rails);
  if (const YAML::Node kb = doc["knowledge_base"]) {
    if (!kb.IsSequence()) r.fail(kb, "knowledge_base must be a list");
    for (const auto& item : kb) {
      if (item.IsMap()) {
        r.expect_keys(item, {"file"}, "knowledge_base entry");
        for (auto& chunk : split_paragraphs(read_file(dir / r.text(item["file"], "file")))) {
          cfg.knowledge_base.push_back(std::move(chunk));
        }
      } else {
        cfg.knowledge_base.push_back(r.text(item, "knowledge_base entry"));
      }
    }
  }
  if (const YAML::Node stubs = doc["stub_actions"]) {
    if (!stubs.IsMap()) r.fail(stubs, "stub_actions must be a mapping");
    for (const auto& kv : stubs) {
      const std::string name = colang::normalize_action_name(kv.first.as<std::string>());
      if (!kv.second.IsScalar() && !kv.second.IsNull()) r.fail(kv.second, "stub action result must be a scalar");
      runtime::Value v;
      if (kv.second.IsScalar()) {
        const std::string s = kv.second.Scalar();
        if (kv.second.Tag() == "!") {
          v = s;  // quoted: keep as text
        } else if (s == "true" || s == "false") {
          v = s == "true";
        } else {
          char* end = nullptr;
          const double d = std::strtod(s.c_str(), &end);
          v = (!s.empty() && end && *end == '\0') ? runtime::Value{d} : runtime::Value{s};
        }
      }
      cfg.stub_actions[name] = v;
    }
  }
  if (doc["fallback_message"]) cfg.engine.fallback_message = r.text(doc["fallback_message"], "fallback_message");
  if (doc["event_budget"]) {
    cfg.engine.event_budget = r.scalar<int>(doc["event_budget"], "event_budget");
    if (cfg.engine.event_budget < 1) r.fail(doc["event_budget"], "event_budget must be positive");
  }

  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".co") {
      cfg.colang_files.push_back(entry.path().filename().string());
    }
  }
  std::sort(cfg.colang_files.begin(), cfg.colang_files.end());
  std::vector<colang::Diagnostic> errors;
  for (const auto& name : cfg.colang_files) {
    try {
      cfg.script.merge(colang::parse_script(read_file(dir / name), name));
    } catch (const colang::ColangError& e) {
      errors.insert(errors.end(), e.diagnostics().begin(), e.diagnostics().end());
    }
  }
  for (auto& d : colang::validate(cfg.script)) (d.is_error() ? errors : cfg.warnings).push_back(std::move(d));
  if (!errors.empty()) {
    std::string msg = dir.string() + ": invalid Colang";
    for (const auto& d : errors) msg += "\n" + d.to_string();
    throw ConfigError(msg);
  }

  if (cfg.rails.fact_check && cfg.knowledge_base.empty()) {
    const bool retrieves = std::any_of(cfg.script.flows.begin(), cfg.script.flows.end(), [](const auto& f) {
      return colang::format_elements(f.elements).find("retrieve_relevant_chunks") != std::string::npos;
    });
    if (!retrieves) throw ConfigError(config_path.string() + ": fact_check needs a knowledge_base or a retrieval flow");
  }
  return cfg;
}

std::shared_ptr<llm::LlmProvider> make_llm(const AppConfig& config) {
  if (config.model.kind == "mock") {
    return std::make_shared<llm::MockLlm>(llm::MockLlm::load_rules(config.model.rules.string()));
  }
  return std::make_shared<llm::HttpLlm>(llm::HttpLlmSettings{config.model.endpoint, config.model.name,
                                                             env_or_empty("RAILGATE_LLM_API_KEY"),
                                                             std::chrono::milliseconds(config.model.timeout_ms)});
}

std::shared_ptr<embedding::EmbeddingProvider> make_embedder(const AppConfig& config) {
  std::shared_ptr<embedding::EmbeddingProvider> embedder;
  if (config.embedding.kind == "hash") {
    embedder = std::make_shared<embedding::HashEmbedder>(config.embedding.dim);
  } else {
    embedder = std::make_shared<embedding::HttpEmbedder>(embedding::HttpEmbedderSettings{
        config.embedding.endpoint, config.embedding.name, config.embedding.dim,
        env_or_empty("RAILGATE_EMBEDDINGS_API_KEY"), std::chrono::milliseconds(config.embedding.timeout_ms)});
  }
  return std::make_shared<embedding::CachingEmbedder>(embedder);
}

App build_app(AppConfig config, const ProviderOverrides& overrides) {
  App app;
  app.llm = overrides.llm ? overrides.llm : make_llm(config);
  std::shared_ptr<embedding::EmbeddingProvider> embedder = overrides.embedder ? overrides.embedder : make_embedder(config);

  runtime::EngineParts parts;
  parts.script = config.script;
  rails::inject_rail_flows(parts.script, config.rails, !config.knowledge_base.empty());
  parts.prompts = config.prompts;
  parts.retrieval = config.retrieval;
  parts.gateway = std::make_shared<llm::LlmGateway>(app.llm);
  parts.embedder = embedder;
  runtime::register_builtin_actions(parts.actions);
  rails::register_rail_actions(parts.actions, std::make_shared<rails::RailsConfig>(config.rails));
  for (const auto& [name, value] : config.stub_actions) {
    if (parts.actions.contains(name)) throw ConfigError("stub action '" + name + "' shadows a built-in action");
    parts.actions.add(name, [value = value](runtime::ActionCall&) { return value; });
  }
  parts.knowledge_chunks = config.knowledge_base;
  parts.options = config.engine;
  parts.config_id = config.id;
  app.engine = std::make_shared<const runtime::Engine>(std::move(parts));
  app.config = std::move(config);
  return app;
}

std::vector<fs::path> find_app_dirs(const fs::path& root) {
  if (fs::exists(root / "config.yml")) return {root};
  if (!fs::is_directory(root)) throw ConfigError(root.string() + ": not a directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "config.yml")) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace railgate::service
