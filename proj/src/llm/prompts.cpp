// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/llm/prompts.hpp"

#include <cctype>

#include "railgate/colang/format.hpp"

namespace railgate::llm {

namespace {

constexpr const char* kDefaultInstructions =
    "Below is a conversation between a helpful AI assistant and a user. The bot is designed to generate human-like "
    "text based on the input that it receives. The bot is talkative and provides lots of specific details. If the "
    "bot does not know the answer to a question, it truthfully says it does not know.";

constexpr const char* kDefaultSampleConversation = R"(user "Hello there!"
  express greeting
bot express greeting
  "Hello! How can I assist you today?"
user "What can you do for me?"
  ask about capabilities
bot respond about capabilities
  "I am an AI assistant which helps answer questions based on a given knowledge base. For this interaction, I can answer question based on the job report published by US Bureau of Labor Statistics"
user "Tell me a bit about the US Bureau of Labor Statistics."
  ask question about publisher
bot response for question about publisher
  "The Bureau of Labor Statistics is the principal fact-finding agency for the Federal Government in the broad field of labor economics and statistics"
user "thanks"
  express appreciation
bot express appreciation and offer additional help
  "You're welcome. If you have any more questions or if there's anything else I can help you with, please don't hesitate to ask.")";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view first_nonempty_line(std::string_view text) {
  while (!text.empty()) {
    const size_t nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    if (!line.empty()) return line;
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return {};
}

std::string with_header(std::string_view header, std::string_view body) {
  std::string out(header);
  out += "\n\n";
  out += body;
  return out;
}

std::string_view strip_trailing_newlines(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

const embedding::EmbeddingIndex& index_for(const embedding::IndexSet& set, TaskKind kind) {
  switch (kind) {
    case TaskKind::kGenerateUserIntent: return set.user_examples;
    case TaskKind::kGenerateNextStep: return set.flows;
    default: return set.bot_examples;
  }
}

std::vector<embedding::Neighbor> retrieve(GenerationContext& ctx, TaskKind kind, std::string_view query) {
  const auto& index = index_for(ctx.indexes, kind);
  if (index.empty() || ctx.retrieval.k_examples < 1 || trim(query).empty()) return {};
  return embedding::knn(index, query, ctx.retrieval.k_examples, ctx.embedder, ctx.keep);
}

void require_tail(const Transcript& history, TranscriptLine::Kind kind, const char* what) {
  if (history.empty() || history.back().kind != kind) {
    throw std::invalid_argument(std::string("conversation must end with ") + what);
  }
}

}  // namespace

PromptConfig PromptConfig::defaults() { return PromptConfig{kDefaultInstructions, kDefaultSampleConversation}; }

std::string PromptParts::render() const {
  std::string out;
  for (const std::string* part : {&general_instructions, &sample_conversation, &fewshot_block, &current_conversation}) {
    if (part->empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += *part;
  }
  return out;
}

std::string render_conversation(const Transcript& transcript) {
  std::string out;
  for (const auto& line : transcript) {
    switch (line.kind) {
      case TranscriptLine::Kind::kUserSaid: out += "user " + colang::quote(line.text); break;
      case TranscriptLine::Kind::kUserIntent: out += "  " + line.text; break;
      case TranscriptLine::Kind::kBotIntent: out += "bot " + line.text; break;
      case TranscriptLine::Kind::kBotSaid: out += "  " + colang::quote(line.text); break;
    }
    out += '\n';
  }
  return out;
}

std::string render_intents(const Transcript& transcript) {
  std::string out;
  for (const auto& line : transcript) {
    if (line.kind == TranscriptLine::Kind::kUserIntent) {
      out += "user " + line.text + "\n";
    } else if (line.kind == TranscriptLine::Kind::kBotIntent) {
      out += "bot " + line.text + "\n";
    }
  }
  return out;
}

std::string render_fewshot(TaskKind kind, const std::vector<embedding::Neighbor>& examples) {
  std::string out;
  for (const auto& n : examples) {
    if (!out.empty()) out += "\n\n";
    switch (kind) {
      case TaskKind::kGenerateUserIntent:
        out += "user " + colang::quote(n.item->text) + "\n  " + n.item->payload;
        break;
      case TaskKind::kGenerateNextStep:
        out += strip_trailing_newlines(n.item->text);
        break;
      case TaskKind::kGenerateBotMessage:
        out += "bot " + n.item->payload + "\n  " + colang::quote(n.item->text);
        break;
      default:
        throw std::invalid_argument("few-shot examples exist only for the dialogue generation tasks");
    }
  }
  return out;
}

PromptParts assemble_task_prompt(TaskKind kind, const PromptConfig& config, const Transcript& history,
                                 const std::vector<embedding::Neighbor>& retrieved, std::string_view extra_context) {
  std::string_view examples_header;
  switch (kind) {
    case TaskKind::kGenerateUserIntent: examples_header = kUserExamplesHeader; break;
    case TaskKind::kGenerateNextStep: examples_header = kFlowExamplesHeader; break;
    case TaskKind::kGenerateBotMessage: examples_header = kBotExamplesHeader; break;
    default: throw std::invalid_argument(std::string("no dialogue prompt for task ") + task_kind_name(kind));
  }
  PromptParts parts;
  if (!trim(config.general_instructions).empty()) {
    parts.general_instructions = "\"\"\"\n" + std::string(trim(config.general_instructions)) + "\n\"\"\"";
  }
  if (!trim(extra_context).empty()) {
    if (!parts.general_instructions.empty()) parts.general_instructions += "\n\n";
    parts.general_instructions += with_header(kExtraContextHeader, trim(extra_context));
  }
  if (!trim(config.sample_conversation).empty()) {
    parts.sample_conversation = with_header(kSampleHeader, strip_trailing_newlines(config.sample_conversation));
  }
  if (!retrieved.empty()) parts.fewshot_block = with_header(examples_header, render_fewshot(kind, retrieved));
  const std::string current =
      kind == TaskKind::kGenerateNextStep ? render_intents(history) : render_conversation(history);
  parts.current_conversation = with_header(kCurrentHeader, current);
  return parts;
}

std::string parse_intent_output(std::string_view text) { return lower(first_nonempty_line(text)); }

std::string parse_next_step_output(std::string_view text) {
  const std::string line = lower(first_nonempty_line(text));
  if (line.rfind("bot ", 0) != 0 || trim(std::string_view(line).substr(4)).empty()) {
    throw MalformedStep("expected a 'bot <form>' line, got \"" + std::string(first_nonempty_line(text)) + "\"");
  }
  return std::string(trim(std::string_view(line).substr(4)));
}

std::string parse_bot_message_output(std::string_view text) {
  const size_t open = text.find('"');
  if (open != std::string_view::npos) {
    std::string out;
    for (size_t i = open + 1; i < text.size(); ++i) {
      const char c = text[i];
      if (c == '\\' && i + 1 < text.size() && (text[i + 1] == '"' || text[i + 1] == '\\')) {
        out.push_back(text[++i]);
      } else if (c == '"') {
        return std::string(trim(out));
      } else {
        out.push_back(c);
      }
    }
  }
  return std::string(trim(text));
}

IntentResult generate_user_intent(GenerationContext& ctx, const Transcript& history,
                                  const std::vector<std::string>& defined_forms) {
  require_tail(history, TranscriptLine::Kind::kUserSaid, "a user utterance");
  IntentResult result;
  result.retrieved = retrieve(ctx, TaskKind::kGenerateUserIntent, history.back().text);
  const PromptParts parts = assemble_task_prompt(TaskKind::kGenerateUserIntent, ctx.prompts, history, result.retrieved);
  result.raw = parse_intent_output(ctx.gateway.run(TaskKind::kGenerateUserIntent, parts.render()).text);
  result.form = result.raw;
  if (result.raw.empty()) return result;
  if (ctx.retrieval.similarity_threshold) {
    if (auto m = embedding::similarity_match(result.raw, defined_forms, *ctx.retrieval.similarity_threshold,
                                             ctx.embedder)) {
      result.form = m->form;
      result.matched = true;
      result.score = m->score;
    }
  } else {
    for (const auto& f : defined_forms) {
      if (f == result.raw) {
        result.matched = true;
        result.score = 1.0;
        break;
      }
    }
  }
  return result;
}

NextStepResult generate_next_step(GenerationContext& ctx, const Transcript& history) {
  const TranscriptLine* last_intent = nullptr;
  for (auto it = history.rbegin(); it != history.rend() && !last_intent; ++it) {
    if (it->kind == TranscriptLine::Kind::kUserIntent || it->kind == TranscriptLine::Kind::kBotIntent) last_intent = &*it;
  }
  if (!last_intent) throw std::invalid_argument("conversation must contain an intent");
  NextStepResult result;
  result.retrieved = retrieve(ctx, TaskKind::kGenerateNextStep, last_intent->text);
  const PromptParts parts = assemble_task_prompt(TaskKind::kGenerateNextStep, ctx.prompts, history, result.retrieved);
  result.form = parse_next_step_output(ctx.gateway.run(TaskKind::kGenerateNextStep, parts.render()).text);
  return result;
}

BotMessageResult generate_bot_message(GenerationContext& ctx, const Transcript& history,
                                      std::string_view extra_context) {
  require_tail(history, TranscriptLine::Kind::kBotIntent, "a bot intent");
  const auto retrieved = retrieve(ctx, TaskKind::kGenerateBotMessage, history.back().text);
  BotMessageResult result;
  result.prompt =
      assemble_task_prompt(TaskKind::kGenerateBotMessage, ctx.prompts, history, retrieved, extra_context).render();
  result.text = parse_bot_message_output(ctx.gateway.run(TaskKind::kGenerateBotMessage, result.prompt).text);
  return result;
}

}  // namespace railgate::llm
