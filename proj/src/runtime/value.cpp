// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/runtime/value.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace railgate::runtime {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_false(const Value& v) { return !is_null(v) && !truthy(v); }

bool values_equal(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  return a == b;
}

}  // namespace

bool truthy(const Value& v) {
  return std::visit(Overloaded{
                        [](std::monostate) { return false; },
                        [](bool b) { return b; },
                        [](double d) { return d != 0.0 && !std::isnan(d); },
                        [](const std::string& s) { return !s.empty(); },
                    },
                    v);
}

std::string to_display(const Value& v) {
  return std::visit(Overloaded{
                        [](std::monostate) { return std::string(); },
                        [](bool b) { return std::string(b ? "true" : "false"); },
                        [](double d) {
                          char buf[32];
                          auto res = std::to_chars(buf, buf + sizeof buf, d);
                          return std::string(buf, res.ptr);
                        },
                        [](const std::string& s) { return s; },
                    },
                    v);
}

nlohmann::json to_json(const Value& v) {
  return std::visit(Overloaded{
                        [](std::monostate) { return nlohmann::json(nullptr); },
                        [](bool b) { return nlohmann::json(b); },
                        [](double d) { return nlohmann::json(d); },
                        [](const std::string& s) { return nlohmann::json(s); },
                    },
                    v);
}

Value value_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw std::invalid_argument("context values must be null, boolean, number or string");
}

Value eval_expression(const Context& context, const colang::Expr& expr) {
  using namespace colang;
  return std::visit(
      Overloaded{
          [&](const VarRef& v) -> Value {
            auto it = context.find(v.name);
            return it == context.end() ? Value{} : it->second;
          },
          [](const BoolLit& b) -> Value { return b.value; },
          [](const TextLit& t) -> Value { return t.value; },
          [](const NumLit& n) -> Value { return n.value; },
          [](const NullLit&) -> Value { return std::monostate{}; },
          [&](const Not& n) -> Value { return !truthy(eval_expression(context, *n.inner)); },
          [&](const Binary& b) -> Value {
            const Value l = eval_expression(context, *b.left);
            const Value r = eval_expression(context, *b.right);
            switch (b.op) {
              case BinaryOp::kAnd:
                if (is_false(l) || is_false(r)) return false;
                if (is_null(l) || is_null(r)) return std::monostate{};
                return true;
              case BinaryOp::kOr:
                if (truthy(l) || truthy(r)) return true;
                if (is_null(l) || is_null(r)) return std::monostate{};
                return false;
              case BinaryOp::kEq: return values_equal(l, r);
              case BinaryOp::kNeq: return !values_equal(l, r);
            }
            return std::monostate{};
          },
      },
      expr.node);
}

std::string interpolate(std::string_view text, const Context& context) {
  std::string out;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool starts_name = i + 1 < text.size() &&
                             (std::isalpha(static_cast<unsigned char>(text[i + 1])) || text[i + 1] == '_');
    if (c != '$' || !starts_name) {
      out.push_back(c);
      continue;
    }
    size_t j = i + 1;
    while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
    auto it = context.find(std::string(text.substr(i + 1, j - i - 1)));
    if (it != context.end()) out += to_display(it->second);
    i = j - 1;
  }
  return out;
}

}  // namespace railgate::runtime
