// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/colang/parser.hpp"

#include <cctype>
#include <charconv>
#include <set>

#include "railgate/colang/lexer.hpp"

namespace railgate::colang {

namespace {

// Internal unwinding signal; converted to a Diagnostic by the top-level loop.
struct SyntaxError {
  Diagnostic diag;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string_view file) : tokens_(std::move(tokens)), file_(file) {
    depth_before_.reserve(tokens_.size() + 1);
    int depth = 0;
    for (const Token& t : tokens_) {
      depth_before_.push_back(depth);
      if (t.kind == TokenKind::kIndent) ++depth;
      if (t.kind == TokenKind::kDedent) --depth;
    }
    depth_before_.push_back(depth);
  }

  Script parse_script() {
    Script script;
    script.source_name = std::string(file_);
    std::vector<Diagnostic> errors;
    while (!at_end()) {
      try {
        parse_define(script);
      } catch (const SyntaxError& e) {
        errors.push_back(e.diag);
        synchronize();
      }
    }
    if (!errors.empty()) throw ParseError(std::move(errors));
    return script;
  }

  ExprPtr parse_standalone_expression() {
    try {
      ExprPtr e = parse_expr();
      if (check(TokenKind::kNewline)) ++pos_;
      if (!at_end()) fail("unexpected trailing input");
      return e;
    } catch (const SyntaxError& e) {
      throw ParseError({e.diag});
    }
  }

 private:
  // ---- token helpers -----------------------------------------------------

  bool at_end() const { return pos_ >= tokens_.size(); }
  bool check(TokenKind k) const { return !at_end() && tokens_[pos_].kind == k; }
  const Token& peek() const { return tokens_[pos_]; }

  [[noreturn]] void fail_at(const Token& t, std::string msg) const {
    throw SyntaxError{Diagnostic{Severity::kError, std::move(msg), t.line, t.column, std::string(file_)}};
  }

  [[noreturn]] void fail(std::string msg) const {
    int line = 0, col = 0;
    if (!at_end()) {
      line = peek().line;
      col = peek().column;
    } else if (!tokens_.empty()) {
      line = tokens_.back().line;
      col = tokens_.back().column;
    }
    throw SyntaxError{Diagnostic{Severity::kError, std::move(msg), line, col, std::string(file_)}};
  }

  std::string describe_current() const {
    if (at_end()) return "end of input";
    const Token& t = peek();
    std::string s = token_kind_name(t.kind);
    if (!t.lexeme.empty()) s += " '" + t.lexeme + "'";
    return s;
  }

  const Token& expect(TokenKind k, const char* what) {
    if (!check(k)) fail(std::string("expected ") + what + ", found " + describe_current());
    return tokens_[pos_++];
  }

  void synchronize() {
    if (!at_end()) ++pos_;
    while (!at_end()) {
      const bool line_start = pos_ == 0 || tokens_[pos_ - 1].kind == TokenKind::kNewline ||
                              tokens_[pos_ - 1].kind == TokenKind::kDedent;
      if (peek().kind == TokenKind::kDefine && depth_before_[pos_] == 0 && line_start) return;
      ++pos_;
    }
  }

  // Reads consecutive word tokens up to (not including) a stop token.
  std::vector<const Token*> read_words() {
    std::vector<const Token*> words;
    while (!at_end() && peek().is_word()) words.push_back(&tokens_[pos_++]);
    return words;
  }

  static std::string join(const std::vector<const Token*>& words) {
    std::string out;
    for (const Token* w : words) {
      if (!out.empty()) out.push_back(' ');
      out += w->lexeme;
    }
    return out;
  }

  std::string read_form(const char* context) {
    auto words = read_words();
    if (words.empty()) fail(std::string("expected canonical form after '") + context + "', found " + describe_current());
    for (const Token* w : words) {
      for (char c : w->lexeme) {
        if (std::isupper(static_cast<unsigned char>(c))) {
          throw SyntaxError{Diagnostic{Severity::kError, "canonical form words must be lowercase: '" + w->lexeme + "'",
                                       w->line, w->column, std::string(file_)}};
        }
      }
    }
    return join(words);
  }

  SourceLoc loc_of(const Token& t) const { return SourceLoc{std::string(file_), t.line, t.column}; }

  // ---- definitions -------------------------------------------------------

  void parse_define(Script& script) {
    const Token& define = expect(TokenKind::kDefine, "'define'");
    if (check(TokenKind::kUser)) {
      ++pos_;
      UserMessageDef def;
      def.loc = loc_of(define);
      def.canonical_form = read_form("define user");
      expect(TokenKind::kNewline, "end of line after canonical form");
      if (check(TokenKind::kIndent)) {
        ++pos_;
        def.examples = parse_string_block();
      }
      script.user_defs.push_back(std::move(def));
    } else if (check(TokenKind::kBot)) {
      ++pos_;
      BotMessageDef def;
      def.loc = loc_of(define);
      def.canonical_form = read_form("define bot");
      expect(TokenKind::kNewline, "end of line after canonical form");
      if (!check(TokenKind::kIndent)) fail_at(define, "bot message definition needs at least one indented utterance");
      ++pos_;
      def.utterances = parse_string_block();
      script.bot_defs.push_back(std::move(def));
    } else if (check(TokenKind::kFlow)) {
      ++pos_;
      FlowDef flow;
      flow.loc = loc_of(define);
      auto words = read_words();
      if (words.empty()) fail("expected flow name, found " + describe_current());
      flow.name = join(words);
      expect(TokenKind::kNewline, "end of line after flow name");
      if (!check(TokenKind::kIndent)) fail_at(define, "flow '" + flow.name + "' must have at least one indented element");
      ++pos_;
      flow.elements = parse_block_body();
      script.flows.push_back(std::move(flow));
    } else {
      fail("expected 'user', 'bot' or 'flow' after 'define', found " + describe_current());
    }
  }

  // After INDENT: STRING NEWLINE ... DEDENT
  std::vector<std::string> parse_string_block() {
    std::vector<std::string> out;
    while (!at_end() && !check(TokenKind::kDedent)) {
      out.push_back(expect(TokenKind::kString, "quoted utterance").lexeme);
      expect(TokenKind::kNewline, "end of line after utterance");
    }
    expect(TokenKind::kDedent, "end of block");
    return out;
  }

  // After INDENT: element+ DEDENT
  std::vector<FlowElement> parse_block_body() {
    std::vector<FlowElement> out;
    while (!at_end() && !check(TokenKind::kDedent)) out.push_back(parse_element());
    expect(TokenKind::kDedent, "end of block");
    if (out.empty()) fail("empty block");
    return out;
  }

  // ---- elements ----------------------------------------------------------

  FlowElement parse_element() {
    if (at_end()) fail("unexpected end of input");
    switch (peek().kind) {
      case TokenKind::kUser: {
        ++pos_;
        UserMatch m;
        if (check(TokenKind::kEllipsis)) {
          ++pos_;
          m.form = kWildcard;
        } else {
          m.form = read_form("user");
        }
        expect(TokenKind::kNewline, "end of line");
        return FlowElement{std::move(m)};
      }
      case TokenKind::kBot: {
        ++pos_;
        BotEmit b;
        if (check(TokenKind::kEllipsis)) {
          ++pos_;
          b.form = kWildcard;
        } else {
          b.form = read_form("bot");
        }
        expect(TokenKind::kNewline, "end of line");
        return FlowElement{std::move(b)};
      }
      case TokenKind::kVar: {
        std::string var = tokens_[pos_++].lexeme;
        expect(TokenKind::kEquals, "'=' after variable");
        if (check(TokenKind::kExecute)) {
          ExecuteAction a = parse_execute();
          a.result_var = std::move(var);
          return FlowElement{std::move(a)};
        }
        ExprPtr e = parse_expr();
        expect(TokenKind::kNewline, "end of line after expression");
        return FlowElement{Assign{std::move(var), std::move(e)}};
      }
      case TokenKind::kExecute:
        return FlowElement{parse_execute()};
      case TokenKind::kIf: {
        ++pos_;
        If node;
        node.cond = parse_expr();
        expect(TokenKind::kNewline, "end of line after condition");
        expect(TokenKind::kIndent, "indented block after 'if'");
        node.then_branch = parse_block_body();
        if (check(TokenKind::kElse)) {
          ++pos_;
          expect(TokenKind::kNewline, "end of line after 'else'");
          expect(TokenKind::kIndent, "indented block after 'else'");
          node.else_branch = parse_block_body();
        }
        return FlowElement{std::move(node)};
      }
      case TokenKind::kStop:
        ++pos_;
        expect(TokenKind::kNewline, "end of line after 'stop'");
        return FlowElement{Stop{}};
      case TokenKind::kEllipsis:
        fail("'...' is only allowed as the form of a user or bot element");
      case TokenKind::kIndent:
        fail("unexpected indentation");
      default:
        fail("expected a flow element, found " + describe_current());
    }
  }

  ExecuteAction parse_execute() {
    expect(TokenKind::kExecute, "'execute'");
    ExecuteAction a;
    auto words = read_words();
    if (words.empty()) fail("expected action name after 'execute', found " + describe_current());
    a.action = normalize_action_name(join(words));
    if (check(TokenKind::kLParen)) {
      ++pos_;
      std::set<std::string> seen;
      if (!check(TokenKind::kRParen)) {
        while (true) {
          if (at_end() || !peek().is_word()) fail("expected argument name, found " + describe_current());
          const Token& name = tokens_[pos_++];
          if (!seen.insert(name.lexeme).second) fail("duplicate argument '" + name.lexeme + "'");
          expect(TokenKind::kEquals, "'=' after argument name");
          a.args.push_back(ActionArg{name.lexeme, parse_expr()});
          if (check(TokenKind::kComma)) {
            ++pos_;
            continue;
          }
          break;
        }
      }
      expect(TokenKind::kRParen, "')'");
    }
    expect(TokenKind::kNewline, "end of line after action");
    return a;
  }

  // ---- expressions -------------------------------------------------------

  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr left = parse_and();
    while (check(TokenKind::kOr)) {
      ++pos_;
      left = make_binary(BinaryOp::kOr, left, parse_and());
    }
    return left;
  }

  ExprPtr parse_and() {
    ExprPtr left = parse_not();
    while (check(TokenKind::kAnd)) {
      ++pos_;
      left = make_binary(BinaryOp::kAnd, left, parse_not());
    }
    return left;
  }

  ExprPtr parse_not() {
    if (check(TokenKind::kNot)) {
      ++pos_;
      return make_not(parse_not());
    }
    return parse_cmp();
  }

  ExprPtr parse_cmp() {
    ExprPtr left = parse_primary();
    if (check(TokenKind::kEqEq) || check(TokenKind::kNotEq)) {
      BinaryOp op = peek().kind == TokenKind::kEqEq ? BinaryOp::kEq : BinaryOp::kNeq;
      ++pos_;
      left = make_binary(op, left, parse_primary());
    }
    return left;
  }

  ExprPtr parse_primary() {
    if (at_end()) fail("expected expression, found end of input");
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::kVar:
        ++pos_;
        return make_var(t.lexeme);
      case TokenKind::kString:
        ++pos_;
        return make_text(t.lexeme);
      case TokenKind::kTrue:
        ++pos_;
        return make_bool(true);
      case TokenKind::kFalse:
        ++pos_;
        return make_bool(false);
      case TokenKind::kNull:
        ++pos_;
        return make_null();
      case TokenKind::kNumber: {
        double v = 0;
        auto [ptr, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
        if (ec != std::errc() || ptr != t.lexeme.data() + t.lexeme.size()) fail("malformed number '" + t.lexeme + "'");
        ++pos_;
        return make_num(v);
      }
      case TokenKind::kLParen: {
        ++pos_;
        ExprPtr e = parse_expr();
        expect(TokenKind::kRParen, "')'");
        return e;
      }
      default:
        fail("expected expression, found " + describe_current());
    }
  }

  std::vector<Token> tokens_;
  std::vector<int> depth_before_;
  std::string_view file_;
  size_t pos_ = 0;
};

}  // namespace

Script parse_script(std::string_view source, std::string_view source_name) {
  return Parser(tokenize(source, source_name), source_name).parse_script();
}

ExprPtr parse_expression(std::string_view source) {
  return Parser(tokenize(source), {}).parse_standalone_expression();
}

}  // namespace railgate::colang
