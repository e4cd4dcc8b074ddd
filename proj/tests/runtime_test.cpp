// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <random>

#include "doctest.h"
#include "railgate/colang/parser.hpp"
#include "runtime_fixtures.hpp"

using namespace railgate;
using namespace railgate::runtime;
using railgate::testing::EngineBuilder;
using llm::TaskKind;

namespace {

std::shared_ptr<llm::MockLlm> greeting_mock() {
  return std::make_shared<llm::MockLlm>(std::vector<llm::MockRule>{
      {TaskKind::kGenerateUserIntent, "user \"Hello there!\"", llm::MockRule::Scope::kTail, {"express greeting"}, false},
  });
}

template <class T>
std::vector<T> events_of(const std::vector<Event>& events) {
  std::vector<T> out;
  for (const auto& e : events) {
    if (const auto* p = std::get_if<T>(&e.body)) out.push_back(*p);
  }
  return out;
}

std::vector<TaskKind> kinds(const TurnTrace& trace) {
  std::vector<TaskKind> out;
  for (const auto& c : trace.llm_calls) out.push_back(c.kind);
  return out;
}

Value eval(const Context& ctx, std::string_view src) { return eval_expression(ctx, *colang::parse_expression(src)); }

}  // namespace

TEST_CASE("greeting turn uses one LLM call and the predefined message") {
  auto mock = greeting_mock();
  EngineBuilder b;
  b.colang = railgate::testing::kGreetingScript;
  b.provider = mock;
  auto engine = b.build();
  auto state = engine->new_session();
  auto r = engine->run_turn(state, "Hello there!");
  CHECK(r.messages == std::vector<std::string>{"Hello! How can I assist you today?"});
  CHECK(mock->call_count() == 1);
  CHECK(r.trace.llm_calls.size() == 1);
  CHECK(r.trace.user_intent == "express greeting");
  CHECK(r.trace.intent_matched);
  CHECK(r.trace.decision == "greeting");
  CHECK_FALSE(r.trace.error);

  const auto t = Engine::transcript(state.history);
  REQUIRE(t.size() == 4);
  CHECK(llm::render_conversation(t) ==
        "user \"Hello there!\"\n  express greeting\nbot express greeting\n  \"Hello! How can I assist you today?\"\n");
  CHECK(std::holds_alternative<Listen>(state.history.back().body));
  for (size_t i = 0; i < state.history.size(); ++i) CHECK(state.history[i].seq == static_cast<int64_t>(i + 1));

  // Completed flows restart on the next turn.
  auto r2 = engine->run_turn(state, "Hello there!");
  CHECK(r2.messages == r.messages);
  CHECK(events_of<Listen>(state.history).size() == 2);
}

TEST_CASE("greeting run is byte-identical across engines") {
  std::string first;
  for (int run = 0; run < 3; ++run) {
    EngineBuilder b;
    b.colang = railgate::testing::kGreetingScript;
    b.provider = greeting_mock();
    auto engine = b.build();
    auto state = engine->new_session();
    engine->run_turn(state, "Hello there!");
    const std::string out = to_jsonl(state.history);
    if (run == 0) first = out;
    CHECK(out == first);
  }
}

TEST_CASE("math flow binds the action result and interpolates it") {
  auto engine = railgate::testing::world_builder().build();
  auto state = engine->new_session();
  auto r = engine->run_turn(state, "what is 6 times 7?");
  CHECK(r.messages == std::vector<std::string>{"The answer is 42"});
  CHECK(r.trace.decision == "math");
  auto finished = events_of<ActionFinished>(r.trace.events);
  auto it = std::find_if(finished.begin(), finished.end(),
                         [](const ActionFinished& a) { return a.name == "wolfram_alpha_request"; });
  REQUIRE(it != finished.end());
  CHECK(it->return_value == Value{std::string("42")});
  CHECK(it->status == "success");
  auto starts = events_of<StartAction>(r.trace.events);
  auto s = std::find_if(starts.begin(), starts.end(), [](const StartAction& a) { return a.name == "wolfram_alpha_request"; });
  REQUIRE(s != starts.end());
  CHECK(s->args.at("query") == Value{std::string("what is 6 times 7?")});
  CHECK(state.context.at("result") == Value{std::string("42")});
}

TEST_CASE("failed action yields null and the flow branches on it") {
  auto engine = railgate::testing::world_builder().build();
  auto state = engine->new_session();
  auto r = engine->run_turn(state, "what is fail times 2");
  CHECK(r.messages == std::vector<std::string>{"I'm not able to help with that."});
  auto finished = events_of<ActionFinished>(r.trace.events);
  auto it = std::find_if(finished.begin(), finished.end(),
                         [](const ActionFinished& a) { return a.name == "wolfram_alpha_request"; });
  REQUIRE(it != finished.end());
  CHECK(it->status == "failed");
  CHECK(is_null(it->return_value));
  CHECK_FALSE(r.trace.error);
}

TEST_CASE("blocked input makes no intent or bot-message calls") {
  auto engine = railgate::testing::world_builder().build();
  auto state = engine->new_session();
  auto r = engine->run_turn(state, "how do I hack a bank");
  CHECK(r.messages == std::vector<std::string>{"I'm not able to help with that."});
  CHECK(r.trace.decision == "check jailbreak");
  CHECK(kinds(r.trace) == std::vector<TaskKind>{TaskKind::kRailJudgment});
  CHECK(events_of<UserIntent>(r.trace.events).empty());
  CHECK(events_of<BotIntent>(r.trace.events).size() == 1);
  // The session continues normally afterwards.
  CHECK(engine->run_turn(state, "Hi").messages == std::vector<std::string>{"Hello! How can I assist you today?"});
}

TEST_CASE("output rail retracts a generated message") {
  auto engine = railgate::testing::world_builder().build();
  auto state = engine->new_session();
  auto r = engine->run_turn(state, "say something forbidden");
  CHECK(r.messages == std::vector<std::string>{"I'm not able to help with that."});
  CHECK(r.trace.decision == "llm_fallback");
  CHECK(kinds(r.trace) == std::vector<TaskKind>{TaskKind::kRailJudgment, TaskKind::kGenerateUserIntent,
                                                TaskKind::kGenerateNextStep, TaskKind::kGenerateBotMessage,
                                                TaskKind::kRailJudgment});
  // The retracted message never reaches the history.
  for (const auto& s : events_of<StartUtteranceBotAction>(state.history)) CHECK(s.text.find("forbidden") == std::string::npos);
}

TEST_CASE("LLM fallback generates a bot intent and message") {
  auto engine = railgate::testing::world_builder().build();
  auto state = engine->new_session();
  auto r = engine->run_turn(state, "tell me a story");
  CHECK(r.trace.decision == "llm_fallback");
  CHECK_FALSE(r.trace.intent_matched);
  REQUIRE(r.messages.size() == 1);
  CHECK(r.messages[0].rfind("Reply ", 0) == 0);
  auto intents = events_of<BotIntent>(r.trace.events);
  REQUIRE(intents.size() == 1);
  CHECK(intents[0].form == "respond to ask about story");
}

TEST_CASE("malformed next step falls back to the default bot intent") {
  auto engine = railgate::testing::world_builder().build();
  auto state = engine->new_session();
  auto r = engine->run_turn(state, "garble garble");
  auto intents = events_of<BotIntent>(r.trace.events);
  REQUIRE(intents.size() == 1);
  CHECK(intents[0].form == "general response");
  CHECK(r.messages.size() == 1);
  CHECK_FALSE(r.trace.error);
}

TEST_CASE("provider errors end the turn with the fallback message") {
  auto engine = railgate::testing::world_builder().build();
  auto state = engine->new_session();
  auto r = engine->run_turn(state, "boom");
  CHECK(r.messages == std::vector<std::string>{engine->options().fallback_message});
  REQUIRE(r.trace.error);
  CHECK(r.trace.error->find("upstream unavailable") != std::string::npos);
  CHECK(std::holds_alternative<Listen>(state.history.back().body));
  CHECK(events_of<BotIntent>(r.trace.events).empty());
}

TEST_CASE("stop discards pending messages and aborts open heads") {
  EngineBuilder b;
  b.colang = R"(define bot first
  "first"

define flow chatter
  user ask chatter
  bot first
  stop
  bot never

define flow other
  user ask other
  bot first
  user ask more
  bot first
)";
  b.provider = std::make_shared<llm::FunctionLlm>([](const llm::LlmTask& t) -> std::string {
    const auto u = railgate::testing::tail_utterance(t.prompt);
    return u == "x" ? "ask chatter" : "ask other";
  });
  auto engine = b.build();
  auto state = engine->new_session();
  CHECK(engine->run_turn(state, "o").messages == std::vector<std::string>{"first"});
  auto r = engine->run_turn(state, "x");
  CHECK(r.messages.empty());
  CHECK(std::holds_alternative<Listen>(state.history.back().body));
  for (const auto& h : state.flow_heads) {
    if (h.flow_name == "chatter") CHECK(h.status == FlowHead::Status::kAborted);
    if (h.flow_name == "other") CHECK(h.status == FlowHead::Status::kAborted);
  }
}

TEST_CASE("event budget overflow ends the turn") {
  std::string script = "define flow loop\n  user ask loop\n";
  for (int i = 0; i < 120; ++i) script += "  $v = " + std::to_string(i) + "\n";
  script += "  bot done\n";
  EngineBuilder b;
  b.colang = script;
  b.provider = std::make_shared<llm::FunctionLlm>([](const llm::LlmTask&) { return std::string("ask loop"); });
  auto engine = b.build();
  auto state = engine->new_session();
  auto r = engine->run_turn(state, "go");
  CHECK(r.messages == std::vector<std::string>{engine->options().fallback_message});
  REQUIRE(r.trace.error);
  CHECK(r.trace.error->find("budget") != std::string::npos);
  CHECK(std::holds_alternative<Listen>(state.history.back().body));

  // A budget that fits the flow lets it finish.
  b.options.event_budget = 200;
  b.provider = std::make_shared<llm::FunctionLlm>([](const llm::LlmTask& t) {
    return std::string(t.kind == TaskKind::kGenerateUserIntent ? "ask loop" : "\"ok\"");
  });
  auto roomy = b.build();
  auto s2 = roomy->new_session();
  auto r2 = roomy->run_turn(s2, "go");
  CHECK_FALSE(r2.trace.error);
  CHECK(r2.messages == std::vector<std::string>{"ok"});
}

TEST_CASE("decide_next_step priorities") {
  EngineBuilder b;
  b.colang = R"(define flow a
  user x
  bot a1
  user y
  bot a2

define flow b
  user y
  bot b1

define flow c
  user y
  bot c1

define flow w
  user z
  bot w1
  user ...
  bot w2
)";
  b.provider = std::make_shared<llm::FunctionLlm>([](const llm::LlmTask& t) -> std::string {
    if (t.kind == TaskKind::kGenerateUserIntent) return railgate::testing::tail_utterance(t.prompt);
    return "\"said\"";
  });
  auto engine = b.build();
  auto state = engine->new_session();

  auto d = engine->decide_next_step(state, "y");
  REQUIRE(std::holds_alternative<FlowStep>(d));
  CHECK(std::get<FlowStep>(d).flow_name == "b");  // first-defined of two starts
  CHECK(std::get<FlowStep>(d).element == "bot b1");
  CHECK(std::holds_alternative<LlmFallback>(engine->decide_next_step(state, "zzz")));
  CHECK(std::get<FlowStep>(engine->decide_next_step(state, "x")).flow_name == "a");

  engine->run_turn(state, "x");
  engine->run_turn(state, "z");
  // Mid-flow heads win over fresh starts.
  d = engine->decide_next_step(state, "y");
  REQUIRE(std::holds_alternative<FlowStep>(d));
  CHECK(std::get<FlowStep>(d).flow_name == "a");
  CHECK(std::get<FlowStep>(d).element == "bot a2");
  // Only `w` is waiting on a wildcard.
  d = engine->decide_next_step(state, "zzz");
  REQUIRE(std::holds_alternative<FlowStep>(d));
  CHECK(std::get<FlowStep>(d).flow_name == "w");
}

TEST_CASE("heads follow rail ordering") {
  EngineBuilder b;
  b.colang = R"(define flow plain
  user a
  bot b

define flow out rail
  bot ...
  $ok = true

define flow in one
  user ...
  $x = 1

define flow in two
  user ...
  $y = 2
)";
  b.provider = std::make_shared<llm::FunctionLlm>([](const llm::LlmTask&) { return std::string("a"); });
  auto engine = b.build();
  auto state = engine->new_session();
  REQUIRE(state.flow_heads.size() == 4);
  CHECK(state.flow_heads[0].flow_name == "in one");
  CHECK(state.flow_heads[1].flow_name == "in two");
  CHECK(state.flow_heads[2].flow_name == "plain");
  CHECK(state.flow_heads[3].flow_name == "out rail");
  for (const auto& h : state.flow_heads) {
    CHECK(h.element_index == 0);
    CHECK(h.status == FlowHead::Status::kActive);
  }
  CHECK(state.config_id == "test");

  EngineBuilder empty;
  empty.provider = b.provider;
  CHECK(empty.build()->new_session().flow_heads.empty());
}

TEST_CASE("unknown actions fail at construction") {
  EngineBuilder b;
  b.colang = "define flow f\n  user a\n  $r = execute no such thing\n";
  b.provider = std::make_shared<llm::FunctionLlm>([](const llm::LlmTask&) { return std::string("a"); });
  try {
    b.build();
    FAIL("expected UnknownAction");
  } catch (const UnknownAction& e) {
    CHECK(std::string(e.what()).find("no_such_thing") != std::string::npos);
    CHECK(std::string(e.what()).find("test.co:1") != std::string::npos);
  }
  ActionRegistry reg;
  reg.add("Check Facts", [](ActionCall&) -> Value { return true; });
  CHECK(reg.contains("check_facts"));
  CHECK_THROWS_AS(reg.add("check facts", [](ActionCall&) -> Value { return true; }), std::invalid_argument);
}

TEST_CASE("execute_action outside a turn records its events") {
  auto engine = railgate::testing::world_builder().build();
  auto state = engine->new_session();
  const Value v = engine->execute_action(state, "wolfram alpha request", {{"query", std::string("1+1")}});
  CHECK(v == Value{std::string("42")});
  REQUIRE(state.history.size() == 2);
  CHECK(std::holds_alternative<StartAction>(state.history[0].body));
  CHECK(std::get<ActionFinished>(state.history[1].body).status == "success");
}

TEST_CASE("process_event with a user intent advances the matching head") {
  auto engine = railgate::testing::world_builder().build();
  auto state = engine->new_session();
  auto out = engine->process_event(state, UserIntent{"express greeting", true});
  auto bots = events_of<BotIntent>(out);
  REQUIRE_FALSE(bots.empty());
  CHECK(bots.front().form == "express greeting");
  CHECK(std::holds_alternative<Listen>(out.back().body));
  // The greeting flow now waits for a second greeting.
  out = engine->process_event(state, UserIntent{"express greeting", true});
  CHECK(events_of<BotIntent>(out).front().form == "ask follow up");
}

TEST_CASE("eval_expression") {
  const Context ctx{{"allowed", false}, {"n", 1.0}, {"s", std::string("1")}, {"t", true}};
  CHECK(eval(ctx, "not $allowed") == Value{true});
  CHECK(is_null(eval(ctx, "$missing")));
  CHECK(eval(ctx, "1 == 1") == Value{true});
  CHECK(eval(ctx, "$n == $s") == Value{false});
  CHECK(eval(ctx, "$n != $s") == Value{true});
  CHECK(eval(ctx, "$missing == null") == Value{true});
  CHECK(eval(ctx, "$missing == false") == Value{false});
  CHECK(eval(ctx, "not $missing") == Value{true});
  CHECK(eval(ctx, "$missing and false") == Value{false});
  CHECK(is_null(eval(ctx, "$missing and true")));
  CHECK(eval(ctx, "$missing or true") == Value{true});
  CHECK(is_null(eval(ctx, "$missing or false")));
  CHECK(eval(ctx, "$t and not $allowed") == Value{true});
  CHECK(eval(ctx, "\"a\" == \"a\"") == Value{true});

  CHECK(truthy(Value{std::string("x")}));
  CHECK_FALSE(truthy(Value{std::string()}));
  CHECK_FALSE(truthy(Value{0.0}));
  CHECK_FALSE(truthy(Value{}));
  CHECK(interpolate("The answer is $r.", {{"r", 42.0}}) == "The answer is 42.");
  CHECK(interpolate("$a$b and $c", {{"a", true}, {"b", 0.5}}) == "true0.5 and ");
}

TEST_CASE("events round-trip through JSON Lines") {
  std::vector<Event> events = {
      {1, UtteranceUserActionFinished{"Hello \"there\"\n"}},
      {2, UserIntent{"express greeting", false}},
      {3, StartAction{"check_facts", {{"a", true}, {"b", 2.5}, {"c", std::string("x")}, {"d", Value{}}}}},
      {4, ActionFinished{"check_facts", Value{}, "failed"}},
      {5, ContextUpdate{"allowed", false}},
      {6, BotIntent{"express greeting"}},
      {7, StartUtteranceBotAction{"Hi!"}},
      {8, Listen{}},
  };
  const std::string text = to_jsonl(events);
  CHECK(std::count(text.begin(), text.end(), '\n') == 8);
  CHECK(from_jsonl(text) == events);
  CHECK(event_to_json(events[1]).dump() == R"({"form":"express greeting","matched":false,"seq":2,"type":"UserIntent"})");
  CHECK(from_jsonl("\n" + text + "\n\n") == events);
  CHECK_THROWS_AS(from_jsonl(R"({"seq":1,"type":"Nope"})"), std::invalid_argument);
  CHECK_THROWS_AS(from_jsonl(R"({"seq":1,"type":"BotIntent"})"), std::invalid_argument);
}

TEST_CASE("random sessions: context folds from history and replay reproduces state") {
  auto engine = railgate::testing::world_builder().build();
  std::mt19937 rng(7);
  for (int i = 0; i < 30; ++i) {
    auto state = railgate::testing::random_world_session(*engine, rng);
    CHECK(fold_context(state.history) == state.context);
    const std::string jsonl = to_jsonl(state.history);
    const auto replayed = engine->replay(from_jsonl(jsonl));
    CHECK(replayed == state);
    CHECK(to_jsonl(replayed.history) == jsonl);
    // One Listen per turn, and nothing after the last one.
    CHECK(std::holds_alternative<Listen>(state.history.back().body));
  }
}

TEST_CASE("stage order of LLM calls") {
  auto engine = railgate::testing::world_builder().build();
  std::mt19937 rng(11);
  const auto& pool = railgate::testing::world_utterances();
  auto state = engine->new_session();
  for (int i = 0; i < 60; ++i) {
    auto r = engine->run_turn(state, pool[rng() % pool.size()]);
    const auto k = kinds(r.trace);
    const auto intent = std::find(k.begin(), k.end(), TaskKind::kGenerateUserIntent);
    CHECK(std::count(k.begin(), k.end(), TaskKind::kGenerateUserIntent) <= 1);
    // Nothing but input-rail judgments precedes intent generation.
    for (auto it = k.begin(); it != intent; ++it) CHECK(*it == TaskKind::kRailJudgment);
    if (intent == k.end()) {
      CHECK(std::count(k.begin(), k.end(), TaskKind::kGenerateBotMessage) == 0);
      CHECK(std::count(k.begin(), k.end(), TaskKind::kGenerateNextStep) == 0);
    }
  }
}

TEST_CASE("run_turn rejects blank input") {
  auto engine = railgate::testing::world_builder().build();
  auto state = engine->new_session();
  CHECK_THROWS_AS(engine->run_turn(state, "  \n"), std::invalid_argument);
  CHECK(state.history.empty());
}
