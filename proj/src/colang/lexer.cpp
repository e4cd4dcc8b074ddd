// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/colang/lexer.hpp"

#include <cctype>
#include <string>
#include <unordered_map>

#include "railgate/colang/diagnostic.hpp"

namespace railgate::colang {

namespace {

const std::unordered_map<std::string_view, TokenKind>& keywords() {
  static const std::unordered_map<std::string_view, TokenKind> kKeywords = {
      {"define", TokenKind::kDefine}, {"user", TokenKind::kUser},   {"bot", TokenKind::kBot},
      {"flow", TokenKind::kFlow},     {"execute", TokenKind::kExecute}, {"if", TokenKind::kIf},
      {"else", TokenKind::kElse},     {"stop", TokenKind::kStop},   {"and", TokenKind::kAnd},
      {"or", TokenKind::kOr},         {"not", TokenKind::kNot},     {"true", TokenKind::kTrue},
      {"false", TokenKind::kFalse},   {"null", TokenKind::kNull},
  };
  return kKeywords;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string normalize_newlines(std::string_view source) {
  std::string out;
  out.reserve(source.size());
  for (size_t i = 0; i < source.size(); ++i) {
    if (source[i] == '\r' && i + 1 < source.size() && source[i + 1] == '\n') continue;
    out.push_back(source[i]);
  }
  return out;
}

class Lexer {
 public:
  Lexer(std::string_view source, std::string_view file) : text_(normalize_newlines(source)), file_(file) {}

  std::vector<Token> run() {
    size_t pos = 0;
    int line_no = 0;
    while (pos < text_.size()) {
      size_t end = text_.find('\n', pos);
      if (end == std::string::npos) end = text_.size();
      ++line_no;
      lex_line(std::string_view(text_).substr(pos, end - pos), line_no);
      pos = end + 1;
    }
    while (indents_.size() > 1) {
      indents_.pop_back();
      tokens_.push_back({TokenKind::kDedent, "", line_no + 1, 1});
    }
    return std::move(tokens_);
  }

 private:
  [[noreturn]] void fail_parse(std::string msg, int line, int col) {
    throw ParseError({Diagnostic{Severity::kError, std::move(msg), line, col, std::string(file_)}});
  }

  void lex_line(std::string_view line, int line_no) {
    size_t indent = 0;
    bool saw_tab = false;
    while (indent < line.size() && (line[indent] == ' ' || line[indent] == '\t')) {
      if (line[indent] == '\t') saw_tab = true;
      ++indent;
    }
    if (indent == line.size() || line[indent] == '#') return;  // blank or comment-only
    if (saw_tab) {
      throw TabIndentationError({Diagnostic{Severity::kError,
                                            "tab character in indentation (use spaces)", line_no,
                                            static_cast<int>(line.find('\t')) + 1,
                                            std::string(file_)}});
    }

    const int col = static_cast<int>(indent);
    if (col > indents_.back()) {
      indents_.push_back(col);
      tokens_.push_back({TokenKind::kIndent, "", line_no, 1});
    } else {
      while (col < indents_.back()) {
        indents_.pop_back();
        tokens_.push_back({TokenKind::kDedent, "", line_no, 1});
      }
      if (col != indents_.back()) fail_parse("inconsistent dedent", line_no, col + 1);
    }

    size_t i = indent;
    while (i < line.size()) {
      const char c = line[i];
      const int column = static_cast<int>(i) + 1;
      if (c == ' ' || c == '\t') {
        ++i;
      } else if (c == '#') {
        break;
      } else if (c == '"') {
        i = lex_string(line, i, line_no);
      } else if (c == '$') {
        size_t j = i + 1;
        while (j < line.size() && is_ident_char(line[j])) ++j;
        if (j == i + 1 || !is_ident_start(line[i + 1])) fail_parse("expected variable name after '$'", line_no, column);
        tokens_.push_back({TokenKind::kVar, std::string(line.substr(i + 1, j - i - 1)), line_no, column});
        i = j;
      } else if (line.substr(i, 3) == "...") {
        tokens_.push_back({TokenKind::kEllipsis, "...", line_no, column});
        i += 3;
      } else if (c == '=' && i + 1 < line.size() && line[i + 1] == '=') {
        tokens_.push_back({TokenKind::kEqEq, "==", line_no, column});
        i += 2;
      } else if (c == '!' && i + 1 < line.size() && line[i + 1] == '=') {
        tokens_.push_back({TokenKind::kNotEq, "!=", line_no, column});
        i += 2;
      } else if (c == '=') {
        tokens_.push_back({TokenKind::kEquals, "=", line_no, column});
        ++i;
      } else if (c == '(') {
        tokens_.push_back({TokenKind::kLParen, "(", line_no, column});
        ++i;
      } else if (c == ')') {
        tokens_.push_back({TokenKind::kRParen, ")", line_no, column});
        ++i;
      } else if (c == ',') {
        tokens_.push_back({TokenKind::kComma, ",", line_no, column});
        ++i;
      } else if (is_digit(c) || (c == '-' && i + 1 < line.size() && is_digit(line[i + 1]))) {
        i = lex_number(line, i, line_no);
      } else if (is_ident_start(c)) {
        size_t j = i;
        while (j < line.size() && is_ident_char(line[j])) ++j;
        std::string_view word = line.substr(i, j - i);
        auto kw = keywords().find(word);
        tokens_.push_back({kw == keywords().end() ? TokenKind::kIdent : kw->second, std::string(word), line_no, column});
        i = j;
      } else {
        fail_parse(std::string("unexpected character '") + c + "'", line_no, column);
      }
    }
    tokens_.push_back({TokenKind::kNewline, "", line_no, static_cast<int>(line.size()) + 1});
  }

  size_t lex_string(std::string_view line, size_t start, int line_no) {
    std::string value;
    size_t i = start + 1;
    while (i < line.size()) {
      const char c = line[i];
      if (c == '"') {
        tokens_.push_back({TokenKind::kString, std::move(value), line_no, static_cast<int>(start) + 1});
        return i + 1;
      }
      if (c == '\\') {
        if (i + 1 < line.size() && (line[i + 1] == '"' || line[i + 1] == '\\')) {
          value.push_back(line[i + 1]);
          i += 2;
          continue;
        }
        fail_parse("unsupported escape sequence (only \\\" and \\\\ are allowed)", line_no, static_cast<int>(i) + 1);
      }
      value.push_back(c);
      ++i;
    }
    throw UnterminatedStringError({Diagnostic{Severity::kError, "unterminated string literal", line_no,
                                              static_cast<int>(start) + 1, std::string(file_)}});
  }

  size_t lex_number(std::string_view line, size_t start, int line_no) {
    size_t j = start;
    if (line[j] == '-') ++j;
    while (j < line.size() && is_digit(line[j])) ++j;
    if (j + 1 < line.size() && line[j] == '.' && is_digit(line[j + 1])) {
      ++j;
      while (j < line.size() && is_digit(line[j])) ++j;
    }
    if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
      size_t k = j + 1;
      if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
      if (k < line.size() && is_digit(line[k])) {
        j = k;
        while (j < line.size() && is_digit(line[j])) ++j;
      }
    }
    if (j < line.size() && is_ident_char(line[j])) {
      fail_parse("malformed number", line_no, static_cast<int>(start) + 1);
    }
    tokens_.push_back({TokenKind::kNumber, std::string(line.substr(start, j - start)), line_no, static_cast<int>(start) + 1});
    return j;
  }

  std::string text_;
  std::string_view file_;
  std::vector<int> indents_{0};
  std::vector<Token> tokens_;
};

}  // namespace

const char* token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::kDefine: return "DEFINE";
    case TokenKind::kUser: return "USER";
    case TokenKind::kBot: return "BOT";
    case TokenKind::kFlow: return "FLOW";
    case TokenKind::kExecute: return "EXECUTE";
    case TokenKind::kIf: return "IF";
    case TokenKind::kElse: return "ELSE";
    case TokenKind::kStop: return "STOP";
    case TokenKind::kAnd: return "AND";
    case TokenKind::kOr: return "OR";
    case TokenKind::kNot: return "NOT";
    case TokenKind::kTrue: return "TRUE";
    case TokenKind::kFalse: return "FALSE";
    case TokenKind::kNull: return "NULL";
    case TokenKind::kIdent: return "IDENT";
    case TokenKind::kVar: return "VAR";
    case TokenKind::kString: return "STRING";
    case TokenKind::kNumber: return "NUMBER";
    case TokenKind::kEllipsis: return "ELLIPSIS";
    case TokenKind::kEquals: return "EQUALS";
    case TokenKind::kEqEq: return "EQEQ";
    case TokenKind::kNotEq: return "NOTEQ";
    case TokenKind::kLParen: return "LPAREN";
    case TokenKind::kRParen: return "RPAREN";
    case TokenKind::kComma: return "COMMA";
    case TokenKind::kNewline: return "NEWLINE";
    case TokenKind::kIndent: return "INDENT";
    case TokenKind::kDedent: return "DEDENT";
  }
  return "?";
}

bool Token::is_word() const {
  switch (kind) {
    case TokenKind::kIdent:
    case TokenKind::kDefine:
    case TokenKind::kUser:
    case TokenKind::kBot:
    case TokenKind::kFlow:
    case TokenKind::kExecute:
    case TokenKind::kIf:
    case TokenKind::kElse:
    case TokenKind::kStop:
    case TokenKind::kAnd:
    case TokenKind::kOr:
    case TokenKind::kNot:
    case TokenKind::kTrue:
    case TokenKind::kFalse:
    case TokenKind::kNull:
      return true;
    default:
      return false;
  }
}

std::vector<Token> tokenize(std::string_view source, std::string_view file) {
  return Lexer(source, file).run();
}

}  // namespace railgate::colang
