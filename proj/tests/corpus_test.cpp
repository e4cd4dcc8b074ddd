// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "railgate/colang/format.hpp"
#include "railgate/colang/parser.hpp"
#include "railgate/llm/prompts.hpp"

namespace fs = std::filesystem;
using namespace railgate;

namespace {

const fs::path kCorpus = fs::path(RAILGATE_SOURCE_DIR) / "tests" / "corpus";

std::vector<fs::path> scripts(const std::string& sub) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(kCorpus / sub)) {
    if (e.path().extension() == ".co") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// From the `# expect-line: N` comment.
int expected_line(const std::string& source) {
  const std::string tag = "# expect-line: ";
  const size_t at = source.find(tag);
  REQUIRE(at != std::string::npos);
  return std::stoi(source.substr(at + tag.size()));
}

}  // namespace

TEST_CASE("valid corpus parses, validates and round-trips") {
  const auto files = scripts("valid");
  REQUIRE(files.size() >= 25);
  for (const char* needed : {"greeting.co", "jailbreak.co", "output_moderation.co", "moderation_both.co", "fact_check.co",
                             "hallucination.co", "sample_conversation.co"}) {
    CHECK(std::any_of(files.begin(), files.end(), [&](const fs::path& p) { return p.filename() == needed; }));
  }

  std::vector<std::string> sources;
  for (const auto& f : files) sources.push_back(slurp(f));

  const auto start = std::chrono::steady_clock::now();
  for (size_t i = 0; i < files.size(); ++i) {
    const std::string name = files[i].filename().string();
    INFO(name);
    const colang::Script first = colang::parse_script(sources[i], name);
    CHECK_FALSE(first.empty());
    CHECK_FALSE(colang::has_errors(colang::validate(first)));
    const std::string formatted = colang::format_script(first);
    const colang::Script second = colang::parse_script(formatted, name);
    CHECK(second == first);
    CHECK(colang::format_script(second) == formatted);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  MESSAGE("valid corpus: " << files.size() << " scripts in " << seconds << " s");
  CHECK(seconds < 1.0);
}

TEST_CASE("invalid corpus yields positioned diagnostics") {
  const auto files = scripts("invalid");
  REQUIRE(files.size() >= 10);
  for (const auto& f : files) {
    const std::string name = f.filename().string();
    INFO(name);
    const std::string source = slurp(f);
    const int line = expected_line(source);
    std::vector<colang::Diagnostic> diags;
    try {
      diags = colang::validate(colang::parse_script(source, name));
    } catch (const colang::ColangError& e) {
      diags = e.diagnostics();
    }
    REQUIRE(colang::has_errors(diags));
    const auto err = std::find_if(diags.begin(), diags.end(), [](const auto& d) { return d.is_error(); });
    CHECK(err->file == name);
    CHECK(err->line == line);
    CHECK(err->column >= 1);
    CHECK(err->to_string().rfind(name + ":" + std::to_string(line) + ":", 0) == 0);
  }
}

TEST_CASE("the sample conversation script matches the default prompt") {
  const colang::Script script = colang::parse_script(slurp(kCorpus / "valid" / "sample_conversation.co"));
  const colang::FlowDef* flow = script.find_flow("sample conversation");
  REQUIRE(flow);

  std::istringstream lines(llm::PromptConfig::defaults().sample_conversation);
  std::vector<std::string> text;
  for (std::string l; std::getline(lines, l);) text.push_back(l);
  REQUIRE(text.size() == 16);
  REQUIRE(flow->elements.size() == 8);
  auto unquote = [](const std::string& s) {
    const size_t a = s.find('"'), b = s.rfind('"');
    return s.substr(a + 1, b - a - 1);
  };
  for (size_t turn = 0; turn < 4; ++turn) {
    const std::string& said = text[4 * turn];
    const std::string intent = text[4 * turn + 1].substr(2);
    const std::string bot_form = text[4 * turn + 2].substr(4);
    const std::string reply = unquote(text[4 * turn + 3]);
    CHECK(std::get<colang::UserMatch>(flow->elements[2 * turn].node).form == intent);
    CHECK(std::get<colang::BotEmit>(flow->elements[2 * turn + 1].node).form == bot_form);
    REQUIRE(script.find_user(intent));
    CHECK(script.find_user(intent)->examples == std::vector<std::string>{unquote(said)});
    REQUIRE(script.find_bot(bot_form));
    CHECK(script.find_bot(bot_form)->utterances == std::vector<std::string>{reply});
  }
}
