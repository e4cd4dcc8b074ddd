// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

// railgate chat|replay|serve|lint|eval

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "railgate/colang/format.hpp"
#include "railgate/colang/parser.hpp"
#include "railgate/errors.hpp"
#include "railgate/eval/eval.hpp"
#include "railgate/service/cli.hpp"
#include "railgate/service/http_server.hpp"

namespace fs = std::filesystem;
using namespace railgate;

namespace {

int lint(const std::vector<std::string>& paths) {
  int errors = 0;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      try {
        const auto cfg = service::load_config(p);
        for (const auto& w : cfg.warnings) std::cout << w.to_string() << "\n";
        std::cout << p << ": ok (" << cfg.script.flows.size() << " flows)\n";
      } catch (const ConfigError& e) {
        std::cout << e.what() << "\n";
        ++errors;
      }
      continue;
    }
    std::ifstream in(p);
    if (!in) {
      std::cout << p << ": cannot read file\n";
      ++errors;
      continue;
    }
    const std::string source((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<colang::Diagnostic> diags;
    try {
      diags = colang::validate(colang::parse_script(source, p));
    } catch (const colang::ColangError& e) {
      diags = e.diagnostics();
    }
    for (const auto& d : diags) std::cout << d.to_string() << "\n";
    if (colang::has_errors(diags)) ++errors;
  }
  return errors == 0 ? 0 : 1;
}

int serve(const std::string& root, const std::string& host, int port) {
  // Block the shutdown signals before any worker thread starts so only sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::vector<service::App> apps;
  for (const auto& dir : service::find_app_dirs(root)) apps.push_back(service::load_app(dir));
  if (apps.empty()) throw ConfigError(root + ": no application directories found");
  service::ChatService chat(std::move(apps));
  service::HttpServer server(chat);
  const int bound = server.bind(host, port);
  std::cerr << "serving " << chat.config_ids().size() << " config(s) on " << host << ":" << bound << "\n";
  std::thread worker([&] { server.serve(); });
  int sig = 0;
  sigwait(&signals, &sig);
  std::cerr << "shutting down\n";
  server.stop();
  worker.join();
  return 0;
}

struct EvalArgs {
  std::string kind;
  std::string config;
  std::string data;
  std::string k = "3";
  double threshold = 0.6;
  uint32_t seed = 42;
  int max_per_intent = 3;
  int workers = 1;
  std::string format = "table";
  std::string out;
  std::string log;
};

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write");
  out << text;
}

int run_eval(const EvalArgs& a) {
  const service::AppConfig cfg = service::load_config(a.config);
  const auto format = a.format == "json" ? eval::ReportFormat::kJson : eval::ReportFormat::kTable;
  nlohmann::json doc;
  std::vector<nlohmann::json> log;
  auto tag = [&log](std::vector<nlohmann::json> entries, const std::string& run) {
    for (auto& e : entries) {
      e["run"] = run;
      log.push_back(std::move(e));
    }
  };

  if (a.kind == "topical") {
    if (a.data.empty()) throw ConfigError("topical evaluation needs --data <intents.csv>");
    eval::IntentDataset data = eval::load_intent_csv(a.data);
    if (a.max_per_intent > 0) data = eval::balance_dataset(data, a.max_per_intent, a.seed);
    eval::TopicalSetup setup;
    // An app without user definitions is evaluated on a script generated from the data.
    setup.script = cfg.script.user_defs.empty() ? eval::build_topical_script(data) : cfg.script;
    setup.prompts = cfg.prompts;
    setup.llm = service::make_llm(cfg);
    setup.embedder = service::make_embedder(cfg);
    const int k = a.k == "all" ? -1 : std::stoi(a.k);
    const auto exact = eval::eval_topical(setup, data, {k, std::nullopt, a.seed, a.workers});
    const auto sim = eval::eval_topical(setup, data, {k, a.threshold, a.seed, a.workers});
    tag(exact.log, "exact");
    tag(sim.log, "sim");
    doc = eval::topical_json({{"k=" + a.k, exact.metrics, sim.metrics}});
  } else if (a.kind == "moderation") {
    if (a.data.empty()) throw ConfigError("moderation evaluation needs --data <prompts.jsonl>");
    const auto prompts = eval::parse_prompt_set(eval::read_text(a.data), a.data);
    std::vector<eval::ModerationMetrics> runs;
    for (auto mode : {eval::ModerationMode::kInput, eval::ModerationMode::kOutput, eval::ModerationMode::kBoth}) {
      auto r = eval::eval_moderation(cfg, {}, prompts, mode);
      runs.push_back(r.metrics);
      tag(std::move(r.log), eval::moderation_mode_name(mode));
    }
    doc = eval::moderation_json(runs);
  } else if (a.kind == "factcheck") {
    if (a.data.empty()) throw ConfigError("factcheck evaluation needs --data <facts.jsonl>");
    auto r = eval::eval_factcheck({service::make_llm(cfg), cfg.rails, cfg.prompts},
                                  eval::parse_fact_records(eval::read_text(a.data), a.data));
    tag(std::move(r.log), "factcheck");
    doc = eval::factcheck_json(r.metrics);
  } else {
    const auto questions = a.data.empty() ? eval::default_false_premise_questions()
                                          : eval::parse_questions(eval::read_text(a.data), a.data);
    auto r = eval::eval_hallucination({service::make_llm(cfg), cfg.rails, cfg.prompts}, questions);
    tag(std::move(r.log), "hallucination");
    doc = eval::hallucination_json(r.metrics);
  }
  write_or_print(a.out, eval::report(doc, format));
  if (!a.log.empty()) write_or_print(a.log, eval::to_jsonl(log));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"railgate: programmable guardrails for LLM chat applications"};
  cli.require_subcommand(1);

  std::string app_dir;
  bool trace = false;
  std::string save;
  auto* chat = cli.add_subcommand("chat", "Chat with an application on stdin/stdout");
  chat->add_option("app", app_dir, "Application directory")->required()->check(CLI::ExistingDirectory);
  chat->add_flag("--trace", trace, "Print the turn trace as JSON after each turn");
  chat->add_option("--save", save, "Write the event history as JSONL");

  std::string history_file;
  auto* replay = cli.add_subcommand("replay", "Re-run a saved JSONL history");
  replay->add_option("app", app_dir, "Application directory")->required()->check(CLI::ExistingDirectory);
  replay->add_option("history", history_file, "JSONL history")->required()->check(CLI::ExistingFile);

  std::string root = "apps";
  std::string host = "127.0.0.1";
  int port = 8000;
  auto* serve_cmd = cli.add_subcommand("serve", "Serve the chat HTTP API");
  serve_cmd->add_option("--apps", root, "Application directory or a directory of them");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port; 0 picks a free one")->check(CLI::Range(0, 65535));

  std::vector<std::string> lint_paths;
  auto* lint_cmd = cli.add_subcommand("lint", "Check .co files or application directories");
  lint_cmd->add_option("paths", lint_paths, "Files or directories")->required();

  EvalArgs ev;
  auto* eval_cmd = cli.add_subcommand("eval", "Score an application on a labelled dataset");
  eval_cmd->add_option("kind", ev.kind, "topical, moderation, factcheck or hallucination")
      ->required()
      ->check(CLI::IsMember({"topical", "moderation", "factcheck", "hallucination"}));
  eval_cmd->add_option("--config", ev.config, "Application directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--data", ev.data, "Dataset file (CSV for topical, JSONL otherwise)")->check(CLI::ExistingFile);
  eval_cmd->add_option("--k", ev.k, "Few-shot examples per prompt, or 'all'")
      ->check(CLI::IsMember({"all"}) | CLI::NonNegativeNumber);
  eval_cmd->add_option("--threshold", ev.threshold, "Similarity threshold for the sim run")->check(CLI::Range(-1.0, 1.0));
  eval_cmd->add_option("--seed", ev.seed, "Sampling seed");
  eval_cmd->add_option("--max-per-intent", ev.max_per_intent, "Samples kept per intent; 0 keeps all")
      ->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--workers", ev.workers, "Parallel requests for order-independent models")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--format", ev.format, "Report format")->check(CLI::IsMember({"table", "json"}));
  eval_cmd->add_option("--out", ev.out, "Write the report here instead of stdout");
  eval_cmd->add_option("--log", ev.log, "Write per-sample records as JSONL");

  CLI11_PARSE(cli, argc, argv);

  try {
    if (*chat) {
      const auto app = service::load_app(app_dir);
      const auto history = service::run_chat(app, std::cin, std::cout, {trace, true});
      if (!save.empty()) {
        std::ofstream out(save);
        out << runtime::to_jsonl(history);
      }
      return 0;
    }
    if (*replay) {
      const auto app = service::load_app(app_dir);
      std::ifstream in(history_file);
      const bool same = service::replay_history(app, in, std::cout);
      if (!same) std::cerr << "replayed history differs from the recording\n";
      return same ? 0 : 1;
    }
    if (*serve_cmd) return serve(root, host, port);
    if (*lint_cmd) return lint(lint_paths);
    if (*eval_cmd) return run_eval(ev);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
