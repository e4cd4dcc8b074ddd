// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "railgate/llm/mock.hpp"
#include "railgate/service/cli.hpp"

namespace fs = std::filesystem;
using namespace railgate;

namespace {

const fs::path kRoot(RAILGATE_SOURCE_DIR);

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  std::string transcript;
  std::string jsonl;
  std::vector<llm::MockCall> calls;
};

Run greet() {
  auto mock = std::make_shared<llm::MockLlm>(llm::MockLlm::load_rules((kRoot / "apps/topical/mock_rules.yml").string()));
  const service::App app = service::load_app(kRoot / "apps/topical", {mock, nullptr});
  std::istringstream in("Hello there!\n");
  std::ostringstream out;
  const auto history = service::run_chat(app, in, out, {});
  return {out.str(), runtime::to_jsonl(history), mock->calls()};
}

}  // namespace

TEST_CASE("greeting matches the golden transcript and event log") {
  const Run run = greet();
  CHECK(run.transcript == slurp(kRoot / "tests/golden/greeting.transcript"));
  CHECK(run.jsonl == slurp(kRoot / "tests/golden/greeting.jsonl"));
  REQUIRE(run.calls.size() == 1);
  CHECK(run.calls[0].kind == llm::TaskKind::kGenerateUserIntent);
  CHECK(run.calls[0].response == "express greeting");
  std::string prompt = run.calls[0].prompt;
  while (!prompt.empty() && prompt.back() == '\n') prompt.pop_back();
  CHECK(prompt.substr(prompt.rfind('\n') + 1) == "user \"Hello there!\"");
}

TEST_CASE("greeting runs are byte-identical") {
  const Run first = greet();
  for (int i = 0; i < 5; ++i) {
    const Run again = greet();
    CHECK(again.transcript == first.transcript);
    CHECK(again.jsonl == first.jsonl);
    REQUIRE(again.calls.size() == first.calls.size());
    CHECK(again.calls[0].prompt == first.calls[0].prompt);
  }
}

TEST_CASE("golden log replays to itself") {
  const service::App app = service::load_app(kRoot / "apps/topical");
  std::ifstream in(kRoot / "tests/golden/greeting.jsonl");
  std::ostringstream out;
  CHECK(service::replay_history(app, in, out));
  CHECK(out.str() == slurp(kRoot / "tests/golden/greeting.transcript"));
}
