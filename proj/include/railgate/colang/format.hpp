// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "railgate/colang/ast.hpp"
#include "railgate/colang/diagnostic.hpp"

namespace railgate::colang {

/// Canonical two-space rendering: user definitions, then bot definitions, then
/// flows, one blank line between blocks. parse_script(format_script(s)) == s.
std::string format_script(const Script& script);

/// Renders one flow body (no `define` line), indented by `indent` spaces.
std::string format_elements(const std::vector<FlowElement>& elements, int indent = 0);

std::string format_expr(const Expr& expr);

/// Double-quoted with `\"` and `\\` escapes.
std::string quote(std::string_view text);

/// Errors: duplicate flow names, duplicate canonical forms (user or bot).
/// Warnings: flow user form without examples, bot form without a definition,
/// the same example utterance under two canonical forms.
std::vector<Diagnostic> validate(const Script& script);

}  // namespace railgate::colang
