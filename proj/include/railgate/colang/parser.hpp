// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "railgate/colang/ast.hpp"
#include "railgate/colang/diagnostic.hpp"

namespace railgate::colang {

/// Parses a `.co` source into a Script.
///
/// Grammar (two-space indentation is conventional, any consistent depth is
/// accepted):
///
///   script   := { define }
///   define   := "define" "user" form NL [ INDENT { STRING NL } DEDENT ]
///             | "define" "bot"  form NL INDENT STRING NL { STRING NL } DEDENT
///             | "define" "flow" words NL INDENT element { element } DEDENT
///   element  := "user" (form | "...") NL
///             | "bot"  (form | "...") NL
///             | [ VAR "=" ] "execute" words [ "(" [ arg { "," arg } ] ")" ] NL
///             | VAR "=" expr NL
///             | "if" expr NL INDENT element { element } DEDENT
///               [ "else" NL INDENT element { element } DEDENT ]
///             | "stop" NL
///   arg      := IDENT "=" expr
///   expr     := or_expr ;  or := and { "or" and } ; and := not { "and" not }
///   not      := "not" not | cmp ;  cmp := primary [ ("=="|"!=") primary ]
///   primary  := VAR | STRING | NUMBER | "true" | "false" | "null" | "(" expr ")"
///
/// On error the parser skips to the next top-level `define` and keeps going;
/// all collected errors are thrown together in a ParseError (lexing errors are
/// thrown as-is).
Script parse_script(std::string_view source, std::string_view source_name = {});

/// Parses a single expression (used by tests and the REPL).
ExprPtr parse_expression(std::string_view source);

}  // namespace railgate::colang
