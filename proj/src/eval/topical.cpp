// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cctype>
#include <climits>
#include <thread>

#include "railgate/colang/format.hpp"
#include "railgate/colang/parser.hpp"
#include "railgate/embedding/index.hpp"
#include "railgate/errors.hpp"
#include "railgate/eval/eval.hpp"
#include "railgate/llm/gateway.hpp"

namespace railgate::eval {

using nlohmann::json;
using llm::TranscriptLine;

std::string canonical_form(const std::string& intent) {
  std::string out;
  for (char c : intent) {
    const auto u = static_cast<unsigned char>(c);
    if (c == '_' || c == '-' || std::isspace(u)) {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else if (std::isalnum(u)) {
      out.push_back(static_cast<char>(std::tolower(u)));
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  if (out.empty()) throw ConfigError("intent '" + intent + "' has no usable characters");
  return out;
}

colang::Script build_topical_script(const IntentDataset& dataset) {
  std::string users, bots, flows;
  for (const auto& intent : dataset.intents()) {
    const std::string form = canonical_form(intent);
    users += "define user " + form + "\n";
    for (const auto& r : dataset.records) {
      if (r.intent == intent) users += "  " + colang::quote(r.utterance) + "\n";
    }
    users += "\n";
    if (auto it = dataset.bot_messages.find(intent); it != dataset.bot_messages.end()) {
      bots += "define bot respond to " + form + "\n  " + colang::quote(it->second) + "\n\n";
    }
    flows += "define flow " + form + "\n  user " + form + "\n  bot respond to " + form + "\n\n";
  }
  return colang::parse_script(users + bots + flows, "<dataset>");
}

namespace {

/// Bot form of the first non-rail flow opening with `user <form>` and
/// continuing with a `bot` element.
const std::string* flow_step(const colang::Script& script, const std::string& form) {
  for (const auto& f : script.flows) {
    if (f.is_rail() || f.elements.size() < 2) continue;
    const auto* u = std::get_if<colang::UserMatch>(&f.elements[0].node);
    const auto* b = std::get_if<colang::BotEmit>(&f.elements[1].node);
    if (u && b && u->form == form && !b->is_wildcard()) return &b->form;
  }
  return nullptr;
}

struct RecordOutcome {
  bool user_ok = false;
  bool bot_ok = false;
  bool message_ok = false;
  bool has_gold_message = false;
  bool error = false;
  json log;
};

}  // namespace

TopicalResult eval_topical(const TopicalSetup& setup, const IntentDataset& dataset, const TopicalOptions& options) {
  if (!setup.llm || !setup.embedder) throw std::invalid_argument("topical evaluation needs an LLM and an embedder");
  if (dataset.records.empty()) throw std::invalid_argument("dataset is empty");

  std::vector<std::string> defined_forms;
  for (const auto& d : setup.script.user_defs) defined_forms.push_back(d.canonical_form);
  std::map<std::string, std::string> gold_form, gold_step;
  for (const auto& intent : dataset.intents()) {
    const std::string form = canonical_form(intent);
    if (!setup.script.find_user(form)) throw ConfigError("dataset intent '" + intent + "' has no 'define user " + form + "'");
    const std::string* step = flow_step(setup.script, form);
    if (!step) throw ConfigError("no flow answers 'user " + form + "' with a bot message");
    gold_form[intent] = form;
    gold_step[intent] = *step;
  }

  embedding::RetrievalConfig retrieval;
  retrieval.k_examples = options.k < 0 ? INT_MAX : options.k;
  retrieval.similarity_threshold = options.threshold;
  const embedding::IndexSet indexes = embedding::build_indexes(setup.script, *setup.embedder, retrieval);
  llm::LlmGateway gateway(setup.llm);

  auto evaluate = [&](size_t index) {
    const IntentRecord& rec = dataset.records[index];
    RecordOutcome out;
    json& log = out.log;
    log["index"] = index;
    log["utterance"] = rec.utterance;
    log["gold_intent"] = gold_form.at(rec.intent);
    log["gold_next_step"] = gold_step.at(rec.intent);

    llm::GenerationContext ctx{gateway, *setup.embedder, indexes, setup.prompts, retrieval,
                               [&rec](const embedding::IndexedItem& item) {
                                 return !(item.kind == embedding::ItemKind::kUserExample && item.text == rec.utterance);
                               }};
    llm::Transcript history{{TranscriptLine::Kind::kUserSaid, rec.utterance}};
    std::string step;
    try {
      const llm::IntentResult intent = llm::generate_user_intent(ctx, history, defined_forms);
      json examples = json::array();
      for (const auto& n : intent.retrieved) {
        if (n.item->kind == embedding::ItemKind::kUserExample && n.item->text == rec.utterance) {
          throw std::logic_error("held-out utterance was retrieved as its own example");
        }
        examples.push_back(n.item->text);
      }
      log["retrieved"] = examples;
      log["predicted_intent"] = intent.form;
      log["intent_matched"] = intent.matched;
      out.user_ok = intent.form == gold_form.at(rec.intent);

      history.push_back({TranscriptLine::Kind::kUserIntent, intent.form});
      const std::string* defined = intent.matched ? flow_step(setup.script, intent.form) : nullptr;
      if (defined) {
        step = *defined;
        log["next_step_source"] = "flow";
      } else {
        log["next_step_source"] = "llm";
        try {
          step = llm::generate_next_step(ctx, history).form;
        } catch (const llm::MalformedStep& e) {
          log["malformed_step"] = e.what();
        }
      }
      log["predicted_next_step"] = step;
      out.bot_ok = step == gold_step.at(rec.intent);

      if (auto gold = dataset.bot_messages.find(rec.intent); gold != dataset.bot_messages.end()) {
        out.has_gold_message = true;
        log["gold_message"] = gold->second;
        std::string message;
        if (!step.empty()) {
          const colang::BotMessageDef* def = setup.script.find_bot(step);
          if (def && !def->utterances.empty()) {
            message = def->utterances.front();
          } else {
            history.push_back({TranscriptLine::Kind::kBotIntent, step});
            message = llm::generate_bot_message(ctx, history).text;
          }
        }
        log["predicted_message"] = message;
        out.message_ok = message == gold->second;
      }
    } catch (const std::logic_error&) {
      throw;
    } catch (const std::exception& e) {
      out.error = true;
      out.has_gold_message = dataset.bot_messages.count(rec.intent) > 0;
      log["error"] = e.what();
    }
    log["user_intent_correct"] = out.user_ok;
    log["bot_intent_correct"] = out.bot_ok;
    if (out.has_gold_message) log["bot_message_correct"] = out.message_ok;
    return out;
  };

  std::vector<RecordOutcome> outcomes(dataset.records.size());
  const int workers = setup.llm->order_independent() ? std::max(1, options.workers) : 1;
  if (workers == 1) {
    for (size_t i = 0; i < outcomes.size(); ++i) outcomes[i] = evaluate(i);
  } else {
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < outcomes.size(); i = next++) {
          try {
            outcomes[i] = evaluate(i);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  TopicalResult result;
  TopicalMetrics& m = result.metrics;
  m.settings = options;
  m.n_samples = static_cast<int>(outcomes.size());
  m.n_intents = static_cast<int>(gold_form.size());
  int with_gold = 0;
  for (auto& o : outcomes) {
    m.user_intent_correct += o.user_ok;
    m.bot_intent_correct += o.bot_ok;
    m.bot_message_correct += o.message_ok;
    with_gold += o.has_gold_message;
    m.errors += o.error;
    result.log.push_back(std::move(o.log));
  }
  m.user_intent_acc = static_cast<double>(m.user_intent_correct) / m.n_samples;
  m.bot_intent_acc = static_cast<double>(m.bot_intent_correct) / m.n_samples;
  if (with_gold > 0) m.bot_message_acc = static_cast<double>(m.bot_message_correct) / with_gold;
  return result;
}

}  // namespace railgate::eval
