// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace railgate::colang {

/// Form text used by `user ...` / `bot ...` elements.
inline constexpr const char* kWildcard = "...";

/// `bot remove last message` retracts the most recent not-yet-delivered bot
/// utterance of the current turn instead of producing one.
inline constexpr const char* kRemoveLastMessage = "remove last message";

/// Position of a definition in its source file. Locations never take part in
/// structural equality, so a formatted-and-reparsed script compares equal to
/// the original.
struct SourceLoc {
  std::string file;
  int line = 0;
  int column = 0;

  friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

// ---------------------------------------------------------------------------
// Expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct VarRef {
  std::string name;
  bool operator==(const VarRef&) const = default;
};
struct BoolLit {
  bool value = false;
  bool operator==(const BoolLit&) const = default;
};
struct TextLit {
  std::string value;
  bool operator==(const TextLit&) const = default;
};
struct NumLit {
  double value = 0.0;
  bool operator==(const NumLit&) const = default;
};
struct NullLit {
  bool operator==(const NullLit&) const = default;
};
struct Not {
  ExprPtr inner;
};
enum class BinaryOp { kAnd, kOr, kEq, kNeq };
struct Binary {
  BinaryOp op = BinaryOp::kAnd;
  ExprPtr left;
  ExprPtr right;
};

struct Expr {
  std::variant<VarRef, BoolLit, TextLit, NumLit, NullLit, Not, Binary> node;
};

bool operator==(const Expr& a, const Expr& b);
bool operator==(const Not& a, const Not& b);
bool operator==(const Binary& a, const Binary& b);

ExprPtr make_var(std::string name);
ExprPtr make_bool(bool v);
ExprPtr make_text(std::string v);
ExprPtr make_num(double v);
ExprPtr make_null();
ExprPtr make_not(ExprPtr inner);
ExprPtr make_binary(BinaryOp op, ExprPtr left, ExprPtr right);

// ---------------------------------------------------------------------------
// Flow elements

struct FlowElement;

struct UserMatch {
  std::string form;  // kWildcard for `user ...`
  bool is_wildcard() const { return form == kWildcard; }
  bool operator==(const UserMatch&) const = default;
};

struct BotEmit {
  std::string form;  // kWildcard for `bot ...`
  bool is_wildcard() const { return form == kWildcard; }
  bool operator==(const BotEmit&) const = default;
};

struct ActionArg {
  std::string name;
  ExprPtr value;
};
bool operator==(const ActionArg& a, const ActionArg& b);

struct ExecuteAction {
  std::string action;  // normalized snake_case
  std::vector<ActionArg> args;
  std::string result_var;  // empty when the result is discarded
  bool operator==(const ExecuteAction&) const = default;
};

struct Assign {
  std::string var;
  ExprPtr expr;
};
bool operator==(const Assign& a, const Assign& b);

struct If {
  ExprPtr cond;
  std::vector<FlowElement> then_branch;
  std::vector<FlowElement> else_branch;
};
bool operator==(const If& a, const If& b);

struct Stop {
  bool operator==(const Stop&) const = default;
};

struct FlowElement {
  std::variant<UserMatch, BotEmit, ExecuteAction, Assign, If, Stop> node;
  bool operator==(const FlowElement&) const = default;
};

// ---------------------------------------------------------------------------
// Definitions

struct UserMessageDef {
  std::string canonical_form;
  std::vector<std::string> examples;
  SourceLoc loc;
  bool operator==(const UserMessageDef&) const = default;
};

struct BotMessageDef {
  std::string canonical_form;
  std::vector<std::string> utterances;
  SourceLoc loc;
  bool operator==(const BotMessageDef&) const = default;
};

struct FlowDef {
  std::string name;
  std::vector<FlowElement> elements;
  SourceLoc loc;

  /// First element is `user ...`.
  bool is_input_rail() const;
  /// First element is `bot ...`.
  bool is_output_rail() const;
  bool is_rail() const { return is_input_rail() || is_output_rail(); }

  bool operator==(const FlowDef&) const = default;
};

struct Script {
  std::vector<UserMessageDef> user_defs;
  std::vector<BotMessageDef> bot_defs;
  std::vector<FlowDef> flows;
  std::string source_name;

  bool empty() const { return user_defs.empty() && bot_defs.empty() && flows.empty(); }

  const UserMessageDef* find_user(std::string_view form) const;
  const BotMessageDef* find_bot(std::string_view form) const;
  const FlowDef* find_flow(std::string_view name) const;

  /// Appends every definition of `other`, keeping order.
  void merge(Script other);

  /// Structural equality over definitions; source_name is ignored.
  friend bool operator==(const Script& a, const Script& b) {
    return a.user_defs == b.user_defs && a.bot_defs == b.bot_defs && a.flows == b.flows;
  }
};

/// `wolfram alpha request` -> `wolfram_alpha_request`.
std::string normalize_action_name(std::string_view name);

}  // namespace railgate::colang
