// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <variant>

#include "json.hpp"
#include "railgate/colang/ast.hpp"

namespace railgate::runtime {

/// Context values: null, bool, number or text.
using Value = std::variant<std::monostate, bool, double, std::string>;

/// Variable name (without `$`) -> value.
using Context = std::map<std::string, Value>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

/// null, false, 0 and "" are false; everything else is true.
bool truthy(const Value& v);

/// Text used when a value is interpolated into a bot message: null -> "",
/// booleans as true/false, numbers in shortest round-trip form.
std::string to_display(const Value& v);

nlohmann::json to_json(const Value& v);
/// Throws std::invalid_argument for arrays and objects.
Value value_from_json(const nlohmann::json& j);

/// Total evaluation. Unset variables read as null. `not` uses truthiness, so
/// `not null` is true. `and`/`or` propagate null unless the other side decides
/// the result. `==` compares same-typed values; mixed types are unequal and
/// null equals only null.
Value eval_expression(const Context& context, const colang::Expr& expr);

/// Replaces `$name` references with to_display of the context value.
std::string interpolate(std::string_view text, const Context& context);

}  // namespace railgate::runtime
