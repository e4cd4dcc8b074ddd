// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

// Terminal front end shared by `railgate chat` and the tests.

#pragma once

#include <iosfwd>
#include <vector>

#include "railgate/runtime/events.hpp"
#include "railgate/service/config.hpp"

namespace railgate::service {

struct ChatLoopOptions {
  bool trace = false;  // print "trace: <json>" after every turn
  bool echo = true;    // print "user: ..." lines
};

/// One user message per input line until EOF or "/quit"; blank lines are
/// skipped. Writes "user: <text>" and "bot: <text>" lines. Returns the
/// session's event history.
std::vector<runtime::Event> run_chat(const App& app, std::istream& in, std::ostream& out,
                                     const ChatLoopOptions& options = {});

/// Re-runs a recorded JSONL history and prints the resulting transcript.
/// Returns true when the replayed events equal the recorded ones.
bool replay_history(const App& app, std::istream& jsonl, std::ostream& out);

/// "user: ..." / "bot: ..." lines for a history.
void print_transcript(const std::vector<runtime::Event>& history, std::ostream& out);

}  // namespace railgate::service
