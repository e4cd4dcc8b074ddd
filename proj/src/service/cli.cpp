// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/service/cli.hpp"

#include <iostream>
#include <sstream>

#include "railgate/service/service.hpp"

namespace railgate::service {

std::vector<runtime::Event> run_chat(const App& app, std::istream& in, std::ostream& out,
                                     const ChatLoopOptions& options) {
  runtime::DialogueState state = app.engine->new_session();
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "/quit") break;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (options.echo) out << "user: " << line << "\n";
    const runtime::TurnResult result = app.engine->run_turn(state, line);
    for (const auto& m : result.messages) out << "bot: " << m << "\n";
    if (options.trace) out << "trace: " << trace_to_json(result.trace).dump() << "\n";
    out.flush();
  }
  return state.history;
}

void print_transcript(const std::vector<runtime::Event>& history, std::ostream& out) {
  for (const auto& line : runtime::Engine::transcript(history)) {
    if (line.kind == llm::TranscriptLine::Kind::kUserSaid) out << "user: " << line.text << "\n";
    if (line.kind == llm::TranscriptLine::Kind::kBotSaid) out << "bot: " << line.text << "\n";
  }
}

bool replay_history(const App& app, std::istream& jsonl, std::ostream& out) {
  std::ostringstream buffer;
  buffer << jsonl.rdbuf();
  const std::vector<runtime::Event> recorded = runtime::from_jsonl(buffer.str());
  const runtime::DialogueState replayed = app.engine->replay(recorded);
  print_transcript(replayed.history, out);
  return runtime::to_jsonl(replayed.history) == runtime::to_jsonl(recorded);
}

}  // namespace railgate::service
