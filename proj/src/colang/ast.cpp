// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/colang/ast.hpp"

#include <algorithm>
#include <cctype>

namespace railgate::colang {

namespace {

bool ptr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

template <typename Def>
const Def* find_by(const std::vector<Def>& defs, std::string_view key, std::string Def::*field) {
  auto it = std::find_if(defs.begin(), defs.end(), [&](const Def& d) { return d.*field == key; });
  return it == defs.end() ? nullptr : &*it;
}

const FlowElement* first_element(const FlowDef& flow) {
  return flow.elements.empty() ? nullptr : &flow.elements.front();
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) { return a.node == b.node; }
bool operator==(const Not& a, const Not& b) { return ptr_equal(a.inner, b.inner); }
bool operator==(const Binary& a, const Binary& b) {
  return a.op == b.op && ptr_equal(a.left, b.left) && ptr_equal(a.right, b.right);
}
bool operator==(const ActionArg& a, const ActionArg& b) {
  return a.name == b.name && ptr_equal(a.value, b.value);
}
bool operator==(const Assign& a, const Assign& b) {
  return a.var == b.var && ptr_equal(a.expr, b.expr);
}
bool operator==(const If& a, const If& b) {
  return ptr_equal(a.cond, b.cond) && a.then_branch == b.then_branch &&
         a.else_branch == b.else_branch;
}

ExprPtr make_var(std::string name) { return std::make_shared<Expr>(Expr{VarRef{std::move(name)}}); }
ExprPtr make_bool(bool v) { return std::make_shared<Expr>(Expr{BoolLit{v}}); }
ExprPtr make_text(std::string v) { return std::make_shared<Expr>(Expr{TextLit{std::move(v)}}); }
ExprPtr make_num(double v) { return std::make_shared<Expr>(Expr{NumLit{v}}); }
ExprPtr make_null() { return std::make_shared<Expr>(Expr{NullLit{}}); }
ExprPtr make_not(ExprPtr inner) { return std::make_shared<Expr>(Expr{Not{std::move(inner)}}); }
ExprPtr make_binary(BinaryOp op, ExprPtr left, ExprPtr right) {
  return std::make_shared<Expr>(Expr{Binary{op, std::move(left), std::move(right)}});
}

bool FlowDef::is_input_rail() const {
  const FlowElement* first = first_element(*this);
  if (!first) return false;
  const auto* m = std::get_if<UserMatch>(&first->node);
  return m && m->is_wildcard();
}

bool FlowDef::is_output_rail() const {
  const FlowElement* first = first_element(*this);
  if (!first) return false;
  const auto* m = std::get_if<BotEmit>(&first->node);
  return m && m->is_wildcard();
}

const UserMessageDef* Script::find_user(std::string_view form) const {
  return find_by(user_defs, form, &UserMessageDef::canonical_form);
}

const BotMessageDef* Script::find_bot(std::string_view form) const {
  return find_by(bot_defs, form, &BotMessageDef::canonical_form);
}

const FlowDef* Script::find_flow(std::string_view name) const {
  return find_by(flows, name, &FlowDef::name);
}

void Script::merge(Script other) {
  std::move(other.user_defs.begin(), other.user_defs.end(), std::back_inserter(user_defs));
  std::move(other.bot_defs.begin(), other.bot_defs.end(), std::back_inserter(bot_defs));
  std::move(other.flows.begin(), other.flows.end(), std::back_inserter(flows));
}

std::string normalize_action_name(std::string_view name) {
  std::string out;
  bool pending_sep = false;
  for (char c : name) {
    if (c == ' ' || c == '\t' || c == '_' || c == '-') {
      pending_sep = !out.empty();
      continue;
    }
    if (pending_sep) out.push_back('_');
    pending_sep = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace railgate::colang
