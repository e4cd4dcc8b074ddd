// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/runtime/engine.hpp"

#include <algorithm>

#include "railgate/colang/format.hpp"

namespace railgate::runtime {

namespace {

using colang::FlowElement;

struct Instr {
  enum class Op { kMatchUser, kMatchBot, kEmitBot, kExec, kAssign, kJumpIfFalse, kJump, kStop };
  Op op;
  std::string form;
  const colang::ExecuteAction* exec = nullptr;
  const colang::Assign* assign = nullptr;
  colang::ExprPtr cond;
  int target = 0;
  std::string source;  // first line of the element's Colang rendering
};

struct CompiledFlow {
  std::string name;
  bool input_rail = false;
  bool output_rail = false;
  std::vector<Instr> code;

  bool is_rail() const { return input_rail || output_rail; }
};

std::string first_line(const FlowElement& el) {
  std::string text = colang::format_elements({el});
  const size_t nl = text.find('\n');
  return nl == std::string::npos ? text : text.substr(0, nl);
}

void compile_into(const std::vector<FlowElement>& elements, std::vector<Instr>& code, bool output_rail_head) {
  for (size_t i = 0; i < elements.size(); ++i) {
    const FlowElement& el = elements[i];
    const std::string source = first_line(el);
    if (const auto* u = std::get_if<colang::UserMatch>(&el.node)) {
      code.push_back(Instr{Instr::Op::kMatchUser, u->form, nullptr, nullptr, nullptr, 0, source});
    } else if (const auto* b = std::get_if<colang::BotEmit>(&el.node)) {
      const bool head = output_rail_head && i == 0 && code.empty();
      code.push_back(Instr{head ? Instr::Op::kMatchBot : Instr::Op::kEmitBot, b->form, nullptr, nullptr, nullptr, 0,
                           source});
    } else if (const auto* x = std::get_if<colang::ExecuteAction>(&el.node)) {
      code.push_back(Instr{Instr::Op::kExec, "", x, nullptr, nullptr, 0, source});
    } else if (const auto* a = std::get_if<colang::Assign>(&el.node)) {
      code.push_back(Instr{Instr::Op::kAssign, "", nullptr, a, nullptr, 0, source});
    } else if (const auto* f = std::get_if<colang::If>(&el.node)) {
      const size_t branch = code.size();
      code.push_back(Instr{Instr::Op::kJumpIfFalse, "", nullptr, nullptr, f->cond, 0, source});
      compile_into(f->then_branch, code, false);
      if (f->else_branch.empty()) {
        code[branch].target = static_cast<int>(code.size());
      } else {
        const size_t jump = code.size();
        code.push_back(Instr{Instr::Op::kJump, "", nullptr, nullptr, nullptr, 0, "else"});
        code[branch].target = static_cast<int>(code.size());
        compile_into(f->else_branch, code, false);
        code[jump].target = static_cast<int>(code.size());
      }
    } else {
      code.push_back(Instr{Instr::Op::kStop, "", nullptr, nullptr, nullptr, 0, source});
    }
  }
}

void collect_actions(const std::vector<FlowElement>& elements, std::vector<std::string>& out) {
  for (const auto& el : elements) {
    if (const auto* x = std::get_if<colang::ExecuteAction>(&el.node)) out.push_back(x->action);
    if (const auto* f = std::get_if<colang::If>(&el.node)) {
      collect_actions(f->then_branch, out);
      collect_actions(f->else_branch, out);
    }
  }
}

bool is_blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

}  // namespace

const char* head_status_name(FlowHead::Status status) {
  switch (status) {
    case FlowHead::Status::kActive: return "active";
    case FlowHead::Status::kCompleted: return "completed";
    case FlowHead::Status::kAborted: return "aborted";
  }
  return "?";
}

// ---------------------------------------------------------------------------

struct Engine::Impl {
  colang::Script script;
  llm::PromptConfig prompts;
  embedding::RetrievalConfig retrieval;
  std::shared_ptr<llm::LlmGateway> gateway;
  std::shared_ptr<embedding::EmbeddingProvider> embedder;
  ActionRegistry actions;
  EngineOptions options;
  std::string config_id;
  embedding::IndexSet indexes;
  std::vector<CompiledFlow> flows;  // input rails first, then the rest, file order within each
  std::vector<std::string> user_forms;
  std::unique_ptr<ActionServices> services;

  struct Pending {
    std::string form;
    std::string text;
    bool from_rail;
  };

  /// Mutable state of one turn in progress.
  struct Turn {
    Turn(DialogueState& s, size_t first) : state(s), start(first) {}

    DialogueState& state;
    size_t start;
    TurnTrace trace;
    std::vector<Pending> pending;
    bool stopped = false;
    bool counting = true;
    int appended = 0;
  };

  llm::GenerationContext generation() const {
    return llm::GenerationContext{*gateway, *embedder, indexes, prompts, retrieval, nullptr};
  }

  // --- events --------------------------------------------------------------

  void append(Turn& turn, EventBody body) const {
    if (turn.counting && ++turn.appended > options.event_budget) {
      throw EventLoopOverflow("turn exceeded its budget of " + std::to_string(options.event_budget) + " events");
    }
    auto& history = turn.state.history;
    const int64_t seq = history.empty() ? 1 : history.back().seq + 1;
    if (const auto* u = std::get_if<ContextUpdate>(&body)) turn.state.context[u->key] = u->value;
    history.push_back(Event{seq, std::move(body)});
  }

  void set_var(Turn& turn, const std::string& key, Value value, FlowHead* head = nullptr) const {
    if (head) head->local_bindings[key] = value;
    append(turn, ContextUpdate{key, std::move(value)});
  }

  void set_if_changed(Turn& turn, const std::string& key, Value value) const {
    auto it = turn.state.context.find(key);
    if (it == turn.state.context.end() ? is_null(value) : it->second == value) return;
    set_var(turn, key, std::move(value));
  }

  // --- heads ---------------------------------------------------------------

  FlowHead& head_for(DialogueState& state, size_t flow) const {
    if (flow < state.flow_heads.size() && state.flow_heads[flow].flow_name == flows[flow].name) {
      return state.flow_heads[flow];
    }
    for (auto& h : state.flow_heads) {
      if (h.flow_name == flows[flow].name) return h;
    }
    state.flow_heads.push_back(FlowHead{flows[flow].name, 0, FlowHead::Status::kActive, {}});
    return state.flow_heads.back();
  }

  void reinstantiate(DialogueState& state) const {
    for (size_t i = 0; i < flows.size(); ++i) {
      FlowHead& h = head_for(state, i);
      if (h.status != FlowHead::Status::kActive) {
        h.status = FlowHead::Status::kActive;
        h.element_index = 0;
        h.local_bindings.clear();
      }
    }
  }

  void abort_open_heads(Turn& turn) const {
    for (size_t i = 0; i < flows.size(); ++i) {
      if (flows[i].is_rail()) continue;
      FlowHead& h = head_for(turn.state, i);
      if (h.status == FlowHead::Status::kActive && h.element_index > 0) h.status = FlowHead::Status::kAborted;
    }
  }

  void stop(Turn& turn) const {
    turn.stopped = true;
    std::erase_if(turn.pending, [](const Pending& p) { return !p.from_rail; });
    abort_open_heads(turn);
  }

  // --- transcript ----------------------------------------------------------

  llm::Transcript current_transcript(const Turn& turn) const {
    llm::Transcript t = Engine::transcript(turn.state.history);
    for (const auto& p : turn.pending) {
      t.push_back({llm::TranscriptLine::Kind::kBotIntent, p.form});
      t.push_back({llm::TranscriptLine::Kind::kBotSaid, p.text});
    }
    return t;
  }

  // --- bot messages --------------------------------------------------------

  std::string resolve_text(Turn& turn, const std::string& form, bool from_rail) const {
    const colang::BotMessageDef* def = script.find_bot(form);
    Value prompt;
    std::string text;
    if (def && !def->utterances.empty()) {
      text = interpolate(def->utterances.front(), turn.state.context);
    } else {
      llm::Transcript t = current_transcript(turn);
      t.push_back({llm::TranscriptLine::Kind::kBotIntent, form});
      auto ctx = generation();
      auto chunks = turn.state.context.find("relevant_chunks");
      const std::string extra = chunks == turn.state.context.end() ? "" : to_display(chunks->second);
      auto r = llm::generate_bot_message(ctx, t, extra);
      text = std::move(r.text);
      prompt = std::move(r.prompt);
    }
    if (!from_rail) {
      set_var(turn, "last_bot_message", text);
      set_if_changed(turn, "last_bot_prompt", std::move(prompt));
    }
    return text;
  }

  std::string next_step(Turn& turn) const {
    auto ctx = generation();
    try {
      return llm::generate_next_step(ctx, current_transcript(turn)).form;
    } catch (const llm::MalformedStep&) {
      return options.default_bot_intent;
    }
  }

  void emit_bot(Turn& turn, std::string form, bool from_rail) const {
    if (form == colang::kRemoveLastMessage) {
      for (auto it = turn.pending.rbegin(); it != turn.pending.rend(); ++it) {
        if (!it->from_rail) {
          turn.pending.erase(std::next(it).base());
          break;
        }
      }
      return;
    }
    if (form == colang::kWildcard) form = next_step(turn);
    std::string text = resolve_text(turn, form, from_rail);
    turn.pending.push_back(Pending{form, std::move(text), from_rail});
    if (!from_rail) run_rails(turn, /*input=*/false);
  }

  // --- actions -------------------------------------------------------------

  Value run_action(Turn& turn, const std::string& name, const std::map<std::string, Value>& args) const {
    append(turn, StartAction{name, args});
    const Action* action = actions.find(name);
    if (!action) throw UnknownAction("unknown action '" + name + "'");
    Value result;
    std::string status = "success";
    try {
      ActionCall call{args, turn.state.context, *services, turn.trace.rail_verdicts};
      result = (*action)(call);
    } catch (const std::exception&) {
      result = std::monostate{};
      status = "failed";
    }
    append(turn, ActionFinished{name, result, status});
    return result;
  }

  // --- flow execution ------------------------------------------------------

  /// Runs from the head's current index until the flow waits for a user
  /// message, finishes, or stops.
  void run_flow(Turn& turn, size_t flow_index) const {
    const CompiledFlow& flow = flows[flow_index];
    const bool rail = flow.is_rail();
    while (true) {
      FlowHead& head = head_for(turn.state, flow_index);
      if (head.status != FlowHead::Status::kActive) return;
      const int pc = head.element_index;
      if (pc >= static_cast<int>(flow.code.size())) {
        head.status = FlowHead::Status::kCompleted;
        return;
      }
      const Instr& in = flow.code[static_cast<size_t>(pc)];
      switch (in.op) {
        case Instr::Op::kMatchUser:
        case Instr::Op::kMatchBot:
          return;
        case Instr::Op::kEmitBot:
          head.element_index = pc + 1;
          emit_bot(turn, in.form, rail);
          if (turn.stopped) return;
          break;
        case Instr::Op::kExec: {
          head.element_index = pc + 1;
          std::map<std::string, Value> args;
          for (const auto& a : in.exec->args) args[a.name] = eval_expression(turn.state.context, *a.value);
          Value v = run_action(turn, in.exec->action, args);
          if (!in.exec->result_var.empty()) set_var(turn, in.exec->result_var, std::move(v), &head_for(turn.state, flow_index));
          break;
        }
        case Instr::Op::kAssign:
          head.element_index = pc + 1;
          set_var(turn, in.assign->var, eval_expression(turn.state.context, *in.assign->expr), &head);
          break;
        case Instr::Op::kJumpIfFalse:
          head.element_index = truthy(eval_expression(turn.state.context, *in.cond)) ? pc + 1 : in.target;
          break;
        case Instr::Op::kJump:
          head.element_index = in.target;
          break;
        case Instr::Op::kStop:
          head.element_index = pc + 1;
          head.status = FlowHead::Status::kAborted;
          stop(turn);
          return;
      }
    }
  }

  /// Runs every input (or output) rail flow once, in order, until one stops
  /// the turn. Returns the stopping flow's name, or empty.
  std::string run_rails(Turn& turn, bool input) const {
    for (size_t i = 0; i < flows.size(); ++i) {
      const CompiledFlow& f = flows[i];
      if (input ? !f.input_rail : !f.output_rail) continue;
      FlowHead& h = head_for(turn.state, i);
      h.status = FlowHead::Status::kActive;
      h.element_index = 1;
      run_flow(turn, i);
      if (turn.stopped) return f.name;
    }
    return {};
  }

  Decision decide(const DialogueState& state, std::string_view intent) const {
    auto head_at = [&](size_t i) -> const FlowHead* {
      if (i < state.flow_heads.size() && state.flow_heads[i].flow_name == flows[i].name) return &state.flow_heads[i];
      for (const auto& h : state.flow_heads) {
        if (h.flow_name == flows[i].name) return &h;
      }
      return nullptr;
    };
    // Flows in definition order: heads are stored rails first, so walk the
    // script to keep the tie-break on file order.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& def : script.flows) {
        const size_t i = flow_position(def.name);
        const CompiledFlow& f = flows[i];
        if (f.is_rail()) continue;
        const FlowHead* h = head_at(i);
        if (!h || h->status != FlowHead::Status::kActive) continue;
        const int pc = h->element_index;
        if (pc >= static_cast<int>(f.code.size())) continue;
        const Instr& in = f.code[static_cast<size_t>(pc)];
        if (in.op != Instr::Op::kMatchUser) continue;
        const bool mid_flow = pc > 0;
        if (pass == 0 && mid_flow && (in.form == intent || in.form == colang::kWildcard)) {
          return FlowStep{f.name, next_source(f, pc + 1)};
        }
        if (pass == 1 && !mid_flow && in.form == intent) return FlowStep{f.name, next_source(f, pc + 1)};
      }
    }
    return LlmFallback{};
  }

  static std::string next_source(const CompiledFlow& f, int pc) {
    return pc < static_cast<int>(f.code.size()) ? f.code[static_cast<size_t>(pc)].source : "";
  }

  size_t flow_position(std::string_view name) const {
    for (size_t i = 0; i < flows.size(); ++i) {
      if (flows[i].name == name) return i;
    }
    throw std::logic_error("flow '" + std::string(name) + "' was not compiled");
  }

  void continue_from_intent(Turn& turn, const std::string& intent) const {
    const Decision d = decide(turn.state, intent);
    if (const auto* step = std::get_if<FlowStep>(&d)) {
      turn.trace.decision = step->flow_name;
      const size_t i = flow_position(step->flow_name);
      FlowHead& h = head_for(turn.state, i);
      if (h.element_index == 0) h.local_bindings.clear();
      h.element_index += 1;
      run_flow(turn, i);
    } else {
      turn.trace.decision = "llm_fallback";
      emit_bot(turn, colang::kWildcard, false);
    }
  }

  // --- turn lifecycle ------------------------------------------------------

  Turn begin(DialogueState& state) const {
    const bool open = !state.history.empty() && !std::holds_alternative<Listen>(state.history.back().body);
    if (!open) reinstantiate(state);
    return Turn{state, state.history.size()};
  }

  void reset_turn_scoped(Turn& turn) const {
    for (const auto& key : options.turn_scoped_variables) set_if_changed(turn, key, std::monostate{});
  }

  void fail(Turn& turn, const std::exception& e) const {
    turn.trace.error = e.what();
    turn.pending.clear();
    turn.pending.push_back(Pending{"", options.fallback_message, true});
    abort_open_heads(turn);
  }

  std::vector<std::string> finish(Turn& turn) const {
    turn.counting = false;
    std::vector<std::string> messages;
    for (const auto& p : turn.pending) {
      if (!p.form.empty()) append(turn, BotIntent{p.form});
      append(turn, StartUtteranceBotAction{p.text});
      messages.push_back(p.text);
    }
    append(turn, Listen{});
    turn.trace.events.assign(turn.state.history.begin() + static_cast<std::ptrdiff_t>(turn.start),
                             turn.state.history.end());
    return messages;
  }
};

// ---------------------------------------------------------------------------

Engine::Engine(EngineParts parts) : impl_(std::make_unique<Impl>()) {
  Impl& m = *impl_;
  if (!parts.gateway) throw ConfigError("engine needs an LLM gateway");
  if (!parts.embedder) throw ConfigError("engine needs an embedding provider");
  m.script = std::move(parts.script);
  m.prompts = std::move(parts.prompts);
  m.retrieval = parts.retrieval;
  m.gateway = std::move(parts.gateway);
  m.embedder = std::move(parts.embedder);
  m.actions = std::move(parts.actions);
  m.options = std::move(parts.options);
  m.config_id = std::move(parts.config_id);
  if (m.options.event_budget < 1) throw ConfigError("event budget must be positive");

  for (const auto& def : m.script.flows) {
    std::vector<std::string> used;
    collect_actions(def.elements, used);
    for (const auto& a : used) {
      if (!m.actions.contains(a)) {
        throw UnknownAction(def.loc.file + ":" + std::to_string(def.loc.line) + ": flow '" + def.name +
                            "' executes unknown action '" + a + "'");
      }
    }
  }
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& def : m.script.flows) {
      if (def.is_input_rail() != (pass == 0)) continue;
      CompiledFlow f{def.name, def.is_input_rail(), def.is_output_rail(), {}};
      compile_into(def.elements, f.code, f.output_rail);
      m.flows.push_back(std::move(f));
    }
  }
  auto add_form = [&](const std::string& form) {
    if (form == colang::kWildcard) return;
    if (std::find(m.user_forms.begin(), m.user_forms.end(), form) == m.user_forms.end()) m.user_forms.push_back(form);
  };
  for (const auto& d : m.script.user_defs) add_form(d.canonical_form);
  for (const auto& f : m.flows) {
    for (const auto& in : f.code) {
      if (in.op == Instr::Op::kMatchUser) add_form(in.form);
    }
  }
  m.indexes = embedding::build_indexes(m.script, *m.embedder, m.retrieval, parts.knowledge_chunks);
  m.services = std::make_unique<ActionServices>(
      ActionServices{*m.gateway, *m.embedder, m.indexes, m.prompts, m.retrieval});
}

Engine::~Engine() = default;

DialogueState Engine::new_session() const {
  DialogueState s;
  s.config_id = impl_->config_id;
  for (const auto& f : impl_->flows) s.flow_heads.push_back(FlowHead{f.name, 0, FlowHead::Status::kActive, {}});
  return s;
}

TurnResult Engine::run_turn(DialogueState& state, std::string_view user_text) const {
  if (is_blank(user_text)) throw std::invalid_argument("user message is empty");
  const Impl& m = *impl_;
  llm::CallCapture capture;
  Impl::Turn turn = m.begin(state);
  try {
    m.append(turn, UtteranceUserActionFinished{std::string(user_text)});
    m.set_var(turn, "last_user_message", std::string(user_text));
    m.reset_turn_scoped(turn);
    const std::string blocked_by = m.run_rails(turn, /*input=*/true);
    if (!blocked_by.empty()) {
      turn.trace.decision = blocked_by;
    } else {
      auto ctx = m.generation();
      auto intent = llm::generate_user_intent(ctx, transcript(state.history), m.user_forms);
      turn.trace.user_intent = intent.form;
      turn.trace.intent_matched = intent.matched;
      m.append(turn, UserIntent{intent.form, intent.matched});
      m.continue_from_intent(turn, intent.form);
    }
  } catch (const std::exception& e) {
    m.fail(turn, e);
  }
  TurnResult result;
  result.messages = m.finish(turn);
  turn.trace.llm_calls = capture.calls();
  result.trace = std::move(turn.trace);
  return result;
}

std::vector<Event> Engine::process_event(DialogueState& state, EventBody event) const {
  const Impl& m = *impl_;
  if (const auto* u = std::get_if<UtteranceUserActionFinished>(&event)) {
    auto r = run_turn(state, u->text);
    return std::vector<Event>(r.trace.events.begin() + 1, r.trace.events.end());
  }
  const bool is_intent = std::holds_alternative<UserIntent>(event);
  const bool is_bot = std::holds_alternative<BotIntent>(event);
  if (!is_intent && !is_bot) {
    Impl::Turn turn{state, state.history.size()};
    turn.counting = false;
    m.append(turn, std::move(event));
    return {};
  }
  llm::CallCapture capture;
  Impl::Turn turn = m.begin(state);
  size_t first_new = state.history.size();
  try {
    if (is_intent) {
      const std::string form = std::get<UserIntent>(event).form;
      m.append(turn, std::move(event));
      first_new = state.history.size();
      m.continue_from_intent(turn, form);
    } else {
      m.emit_bot(turn, std::get<BotIntent>(event).form, false);
    }
  } catch (const std::exception& e) {
    m.fail(turn, e);
  }
  m.finish(turn);
  return std::vector<Event>(state.history.begin() + static_cast<std::ptrdiff_t>(first_new), state.history.end());
}

Decision Engine::decide_next_step(const DialogueState& state, std::string_view user_intent) const {
  return impl_->decide(state, user_intent);
}

Value Engine::execute_action(DialogueState& state, std::string_view name,
                             const std::map<std::string, Value>& args) const {
  Impl::Turn turn{state, state.history.size()};
  turn.counting = false;
  return impl_->run_action(turn, colang::normalize_action_name(name), args);
}

DialogueState Engine::replay(const std::vector<Event>& history) const {
  DialogueState state = new_session();
  bool in_turn = false;
  for (const auto& e : history) {
    if (in_turn) {
      if (std::holds_alternative<Listen>(e.body)) in_turn = false;
      continue;
    }
    const bool starts_turn = std::holds_alternative<UtteranceUserActionFinished>(e.body) ||
                             std::holds_alternative<UserIntent>(e.body) ||
                             std::holds_alternative<BotIntent>(e.body);
    process_event(state, e.body);
    in_turn = starts_turn;
  }
  return state;
}

llm::Transcript Engine::transcript(const std::vector<Event>& history) {
  using K = llm::TranscriptLine::Kind;
  llm::Transcript out;
  for (const auto& e : history) {
    if (const auto* u = std::get_if<UtteranceUserActionFinished>(&e.body)) {
      out.push_back({K::kUserSaid, u->text});
    } else if (const auto* i = std::get_if<UserIntent>(&e.body)) {
      out.push_back({K::kUserIntent, i->form});
    } else if (const auto* b = std::get_if<BotIntent>(&e.body)) {
      out.push_back({K::kBotIntent, b->form});
    } else if (const auto* s = std::get_if<StartUtteranceBotAction>(&e.body)) {
      out.push_back({K::kBotSaid, s->text});
    }
  }
  return out;
}

const colang::Script& Engine::script() const { return impl_->script; }
const embedding::IndexSet& Engine::indexes() const { return impl_->indexes; }
const EngineOptions& Engine::options() const { return impl_->options; }
const std::string& Engine::config_id() const { return impl_->config_id; }
const std::vector<std::string>& Engine::defined_user_forms() const { return impl_->user_forms; }

}  // namespace railgate::runtime
