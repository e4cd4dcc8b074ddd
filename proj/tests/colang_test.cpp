// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"
#include "railgate/colang/format.hpp"
#include "railgate/colang/lexer.hpp"
#include "railgate/colang/parser.hpp"
#include "script_generator.hpp"

using namespace railgate::colang;

namespace {

std::vector<TokenKind> kinds(const std::vector<Token>& tokens) {
  std::vector<TokenKind> out;
  for (const auto& t : tokens) out.push_back(t.kind);
  return out;
}

const char* kMathScript = R"(define flow math
  user ask math question
  $result = execute wolfram alpha request
  bot respond to math question

define flow distance
  user ask distance question
  $result = execute wolfram alpha request
  bot respond to distance question
)";

}  // namespace

TEST_CASE("tokenize greeting flow") {
  auto tokens = tokenize("define flow greeting\n  user express greeting\n  bot express greeting");
  using K = TokenKind;
  std::vector<K> expected = {K::kDefine, K::kFlow,  K::kIdent, K::kNewline, K::kIndent, K::kUser,
                             K::kIdent,  K::kIdent, K::kNewline, K::kBot,   K::kIdent,  K::kIdent,
                             K::kNewline, K::kDedent};
  CHECK(kinds(tokens) == expected);
  CHECK(tokens[2].lexeme == "greeting");
  CHECK(tokens[5].line == 2);
  CHECK(tokens[5].column == 3);
}

TEST_CASE("tokenize empty input") { CHECK(tokenize("").empty()); }

TEST_CASE("tokenize execute assignment") {
  auto tokens = tokenize("$allowed = execute check_jailbreak");
  REQUIRE(tokens.size() == 5);
  CHECK(tokens[0].kind == TokenKind::kVar);
  CHECK(tokens[0].lexeme == "allowed");
  CHECK(tokens[1].kind == TokenKind::kEquals);
  CHECK(tokens[2].kind == TokenKind::kExecute);
  CHECK(tokens[3].kind == TokenKind::kIdent);
  CHECK(tokens[3].lexeme == "check_jailbreak");
  CHECK(tokens[4].kind == TokenKind::kNewline);
}

TEST_CASE("lexer skips comments and blank lines") {
  auto tokens = tokenize("# header\n\ndefine flow a  # trailing\n\n  # inner\n  stop\n");
  using K = TokenKind;
  CHECK(kinds(tokens) == std::vector<K>{K::kDefine, K::kFlow, K::kIdent, K::kNewline, K::kIndent, K::kStop,
                                        K::kNewline, K::kDedent});
}

TEST_CASE("lexer errors") {
  SUBCASE("tab indentation") {
    try {
      tokenize("define flow a\n\tstop\n");
      FAIL("expected TabIndentationError");
    } catch (const TabIndentationError& e) {
      CHECK(e.first().line == 2);
      CHECK(e.first().column == 1);
    }
  }
  SUBCASE("unterminated string") {
    try {
      tokenize("define user x\n  \"hello\n");
      FAIL("expected UnterminatedStringError");
    } catch (const UnterminatedStringError& e) {
      CHECK(e.first().line == 2);
      CHECK(e.first().column == 3);
    }
  }
  SUBCASE("inconsistent dedent") {
    CHECK_THROWS_AS(tokenize("define flow a\n    stop\n  stop\n"), ParseError);
  }
  SUBCASE("unknown escape") { CHECK_THROWS_AS(tokenize("\"a\\nb\"\n"), ParseError); }
}

TEST_CASE("CRLF is normalized") {
  auto lf = parse_script("define user hi\n  \"hello\"\n");
  auto crlf = parse_script("define user hi\r\n  \"hello\"\r\n");
  CHECK(lf == crlf);
}

TEST_CASE("parse the two-flow math/distance script") {
  Script s = parse_script(kMathScript, "math.co");
  REQUIRE(s.flows.size() == 2);
  for (const FlowDef& f : s.flows) {
    REQUIRE(f.elements.size() == 3);
    CHECK(std::holds_alternative<UserMatch>(f.elements[0].node));
    const auto& exec = std::get<ExecuteAction>(f.elements[1].node);
    CHECK(exec.action == "wolfram_alpha_request");
    CHECK(exec.result_var == "result");
    CHECK(std::holds_alternative<BotEmit>(f.elements[2].node));
  }
  CHECK(std::get<UserMatch>(s.flows[0].elements[0].node).form == "ask math question");
  CHECK(s.flows[1].loc.line == 6);
  CHECK(s.flows[1].loc.file == "math.co");
}

TEST_CASE("parse user message definition") {
  Script s = parse_script("define user express greeting\n  \"Hello there!\"\n  \"hi\"");
  REQUIRE(s.user_defs.size() == 1);
  CHECK(s.user_defs[0].canonical_form == "express greeting");
  CHECK(s.user_defs[0].examples == std::vector<std::string>{"Hello there!", "hi"});
}

TEST_CASE("parse rail flows and conditions") {
  Script s = parse_script(R"(define flow check jailbreak
  user ...
  $allowed = execute check_jailbreak
  if not $allowed
    bot inform cannot answer
    stop

define flow check output
  bot ...
  $allowed = execute output_moderation(strict=true, label="x")
  if not $allowed and $mode != "lenient"
    bot remove last message
  else
    $checked = true
)");
  REQUIRE(s.flows.size() == 2);
  CHECK(s.flows[0].is_input_rail());
  CHECK_FALSE(s.flows[0].is_output_rail());
  CHECK(s.flows[1].is_output_rail());
  const auto& cond = std::get<If>(s.flows[0].elements[2].node);
  CHECK(*cond.cond == *make_not(make_var("allowed")));
  REQUIRE(cond.then_branch.size() == 2);
  CHECK(std::holds_alternative<Stop>(cond.then_branch[1].node));
  const auto& exec = std::get<ExecuteAction>(s.flows[1].elements[1].node);
  REQUIRE(exec.args.size() == 2);
  CHECK(exec.args[1].name == "label");
  const auto& second_if = std::get<If>(s.flows[1].elements[2].node);
  CHECK(second_if.else_branch.size() == 1);
}

TEST_CASE("parse errors carry positions") {
  SUBCASE("wildcard outside user/bot") {
    try {
      parse_script("define flow a\n  ...\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.first().line == 2);
      CHECK(e.first().column == 3);
    }
  }
  SUBCASE("bot definition without utterances") {
    CHECK_THROWS_AS(parse_script("define bot hello\n"), ParseError);
  }
  SUBCASE("uppercase canonical form") {
    try {
      parse_script("define user Express greeting\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.first().column == 13);
    }
  }
  SUBCASE("recovery reports every broken block") {
    try {
      parse_script("define flow a\n  user\n\ndefine flow ok\n  stop\n\ndefine thing\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.diagnostics().size() == 2);
      CHECK(e.diagnostics()[0].line == 2);
      CHECK(e.diagnostics()[1].line == 7);
    }
  }
}

TEST_CASE("action names are normalized") {
  CHECK(normalize_action_name("wolfram alpha request") == "wolfram_alpha_request");
  CHECK(normalize_action_name("check_jailbreak") == "check_jailbreak");
  Script a = parse_script("define flow x\n  execute wolfram alpha request\n");
  Script b = parse_script("define flow x\n  execute wolfram_alpha_request\n");
  CHECK(a == b);
}

TEST_CASE("validate") {
  SUBCASE("flows without bot definitions only warn") {
    auto diags = validate(parse_script(kMathScript));
    CHECK_FALSE(diags.empty());
    CHECK_FALSE(has_errors(diags));
  }
  SUBCASE("empty script") { CHECK(validate(Script{}).empty()); }
  SUBCASE("duplicate flow names") {
    auto diags = validate(parse_script("define flow greeting\n  stop\n\ndefine flow greeting\n  stop\n"));
    int errors = 0;
    for (const auto& d : diags) errors += d.is_error();
    CHECK(errors == 1);
    CHECK(diags[0].line == 4);
  }
  SUBCASE("duplicate canonical forms and shared examples") {
    auto diags = validate(parse_script(
        "define user a\n  \"hi\"\n\ndefine user a\n  \"yo\"\n\ndefine user b\n  \"hi\"\n"));
    int errors = 0, warnings = 0;
    for (const auto& d : diags) (d.is_error() ? errors : warnings)++;
    CHECK(errors == 1);
    CHECK(warnings == 1);
  }
}

TEST_CASE("format") {
  CHECK(format_script(Script{}) == "");
  Script s = parse_script("define flow f\n  user a\n  if $x\n    if not $y\n      stop\n  bot b\n");
  CHECK(format_script(s) == "define flow f\n  user a\n  if $x\n    if not $y\n      stop\n  bot b\n");
  Script math = parse_script(kMathScript);
  CHECK(parse_script(format_script(math)) == math);
}

TEST_CASE("expression formatting keeps precedence") {
  for (const char* src : {"not ($a or $b)", "$a and ($b or $c)", "($a == 1) == true", "not not $x",
                          "$a or $b and $c", "\"q\\\"uote\" != null", "-2.5 == $n"}) {
    ExprPtr e = parse_expression(src);
    CAPTURE(src);
    CHECK(*parse_expression(format_expr(*e)) == *e);
  }
  CHECK(format_expr(*parse_expression("($a or $b) and $c")) == "($a or $b) and $c");
}

TEST_CASE("round trip on random scripts") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    Script s = railgate::testing::random_script(rng);
    const std::string text = format_script(s);
    CAPTURE(text);
    Script parsed = parse_script(text);
    CHECK(parsed == s);
    CHECK(format_script(parsed) == text);
  }
}

TEST_CASE("tokenize and parse are deterministic") {
  auto a = tokenize(kMathScript);
  auto b = tokenize(kMathScript);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].kind == b[i].kind);
    CHECK(a[i].lexeme == b[i].lexeme);
  }
}
