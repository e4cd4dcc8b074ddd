// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace railgate::colang {

enum class TokenKind {
  kDefine,
  kUser,
  kBot,
  kFlow,
  kExecute,
  kIf,
  kElse,
  kStop,
  kAnd,
  kOr,
  kNot,
  kTrue,
  kFalse,
  kNull,
  kIdent,
  kVar,     // `$name`, lexeme holds `name`
  kString,  // lexeme holds the unescaped contents
  kNumber,
  kEllipsis,
  kEquals,  // =
  kEqEq,    // ==
  kNotEq,   // !=
  kLParen,
  kRParen,
  kComma,
  kNewline,
  kIndent,
  kDedent,
};

const char* token_kind_name(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string lexeme;
  int line = 0;
  int column = 0;

  /// Keywords and identifiers are both "words" when a canonical form or an
  /// action name is being read.
  bool is_word() const;
};

/// Offside-rule lexer. CRLF is folded to LF, `#` comments and blank lines are
/// skipped, and every logical line ends in a NEWLINE token. Indentation must be
/// spaces.
///
/// Throws TabIndentationError, UnterminatedStringError, or ParseError for an
/// inconsistent dedent or an unexpected character.
std::vector<Token> tokenize(std::string_view source, std::string_view file = {});

}  // namespace railgate::colang
