// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/colang/format.hpp"

#include <charconv>
#include <map>
#include <set>

namespace railgate::colang {

namespace {

// Binding strength; a node is parenthesized when printed where a stronger
// one is required.
enum Level { kOrLevel = 1, kAndLevel = 2, kNotLevel = 3, kCmpLevel = 4, kPrimaryLevel = 5 };

int level_of(const Expr& e) {
  if (const auto* b = std::get_if<Binary>(&e.node)) {
    switch (b->op) {
      case BinaryOp::kOr: return kOrLevel;
      case BinaryOp::kAnd: return kAndLevel;
      default: return kCmpLevel;
    }
  }
  if (std::holds_alternative<Not>(e.node)) return kNotLevel;
  return kPrimaryLevel;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void format_expr_into(const Expr& e, int required, std::string& out) {
  const bool paren = level_of(e) < required;
  if (paren) out.push_back('(');
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VarRef>) {
          out += "$" + node.name;
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          out += node.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, TextLit>) {
          out += quote(node.value);
        } else if constexpr (std::is_same_v<T, NumLit>) {
          out += format_number(node.value);
        } else if constexpr (std::is_same_v<T, NullLit>) {
          out += "null";
        } else if constexpr (std::is_same_v<T, Not>) {
          out += "not ";
          format_expr_into(*node.inner, kNotLevel, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          switch (node.op) {
            case BinaryOp::kOr:
              format_expr_into(*node.left, kOrLevel, out);
              out += " or ";
              format_expr_into(*node.right, kAndLevel, out);
              break;
            case BinaryOp::kAnd:
              format_expr_into(*node.left, kAndLevel, out);
              out += " and ";
              format_expr_into(*node.right, kNotLevel, out);
              break;
            case BinaryOp::kEq:
            case BinaryOp::kNeq:
              format_expr_into(*node.left, kPrimaryLevel, out);
              out += node.op == BinaryOp::kEq ? " == " : " != ";
              format_expr_into(*node.right, kPrimaryLevel, out);
              break;
          }
        }
      },
      e.node);
  if (paren) out.push_back(')');
}

void format_elements_into(const std::vector<FlowElement>& elements, int indent, std::string& out) {
  const std::string pad(static_cast<size_t>(indent), ' ');
  for (const FlowElement& el : elements) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, UserMatch>) {
            out += pad + "user " + node.form + "\n";
          } else if constexpr (std::is_same_v<T, BotEmit>) {
            out += pad + "bot " + node.form + "\n";
          } else if constexpr (std::is_same_v<T, ExecuteAction>) {
            out += pad;
            if (!node.result_var.empty()) out += "$" + node.result_var + " = ";
            out += "execute " + node.action;
            if (!node.args.empty()) {
              out += "(";
              for (size_t i = 0; i < node.args.size(); ++i) {
                if (i) out += ", ";
                out += node.args[i].name + "=";
                format_expr_into(*node.args[i].value, kOrLevel, out);
              }
              out += ")";
            }
            out += "\n";
          } else if constexpr (std::is_same_v<T, Assign>) {
            out += pad + "$" + node.var + " = ";
            format_expr_into(*node.expr, kOrLevel, out);
            out += "\n";
          } else if constexpr (std::is_same_v<T, If>) {
            out += pad + "if ";
            format_expr_into(*node.cond, kOrLevel, out);
            out += "\n";
            format_elements_into(node.then_branch, indent + 2, out);
            if (!node.else_branch.empty()) {
              out += pad + "else\n";
              format_elements_into(node.else_branch, indent + 2, out);
            }
          } else if constexpr (std::is_same_v<T, Stop>) {
            out += pad + "stop\n";
          }
        },
        el.node);
  }
}

void collect_forms(const std::vector<FlowElement>& elements, std::vector<std::pair<std::string, bool>>& out) {
  for (const FlowElement& el : elements) {
    if (const auto* u = std::get_if<UserMatch>(&el.node)) {
      if (!u->is_wildcard()) out.emplace_back(u->form, true);
    } else if (const auto* b = std::get_if<BotEmit>(&el.node)) {
      if (!b->is_wildcard() && b->form != kRemoveLastMessage) out.emplace_back(b->form, false);
    } else if (const auto* i = std::get_if<If>(&el.node)) {
      collect_forms(i->then_branch, out);
      collect_forms(i->else_branch, out);
    }
  }
}

Diagnostic at(const SourceLoc& loc, Severity sev, std::string msg) {
  return Diagnostic{sev, std::move(msg), loc.line, loc.column, loc.file};
}

}  // namespace

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_expr(const Expr& expr) {
  std::string out;
  format_expr_into(expr, kOrLevel, out);
  return out;
}

std::string format_elements(const std::vector<FlowElement>& elements, int indent) {
  std::string out;
  format_elements_into(elements, indent, out);
  return out;
}

std::string format_script(const Script& script) {
  std::string out;
  auto separate = [&] {
    if (!out.empty()) out += "\n";
  };
  for (const UserMessageDef& def : script.user_defs) {
    separate();
    out += "define user " + def.canonical_form + "\n";
    for (const std::string& ex : def.examples) out += "  " + quote(ex) + "\n";
  }
  for (const BotMessageDef& def : script.bot_defs) {
    separate();
    out += "define bot " + def.canonical_form + "\n";
    for (const std::string& u : def.utterances) out += "  " + quote(u) + "\n";
  }
  for (const FlowDef& flow : script.flows) {
    separate();
    out += "define flow " + flow.name + "\n";
    format_elements_into(flow.elements, 2, out);
  }
  return out;
}

std::vector<Diagnostic> validate(const Script& script) {
  std::vector<Diagnostic> diags;

  std::map<std::string, const FlowDef*> flow_names;
  for (const FlowDef& flow : script.flows) {
    auto [it, inserted] = flow_names.emplace(flow.name, &flow);
    if (!inserted) {
      const SourceLoc& first = it->second->loc;
      diags.push_back(at(flow.loc, Severity::kError,
                         "duplicate flow '" + flow.name + "' (first defined at " + first.file + ":" +
                             std::to_string(first.line) + ")"));
    }
  }

  std::map<std::string, const UserMessageDef*> user_forms;
  std::map<std::string, std::string> example_owner;
  for (const UserMessageDef& def : script.user_defs) {
    auto [it, inserted] = user_forms.emplace(def.canonical_form, &def);
    if (!inserted) {
      const SourceLoc& first = it->second->loc;
      diags.push_back(at(def.loc, Severity::kError,
                         "duplicate user canonical form '" + def.canonical_form + "' (first defined at " +
                             first.file + ":" + std::to_string(first.line) + ")"));
    }
    std::set<std::string> local;
    for (const std::string& ex : def.examples) {
      if (!local.insert(ex).second) {
        diags.push_back(at(def.loc, Severity::kWarning,
                           "example \"" + ex + "\" repeated under '" + def.canonical_form + "'"));
        continue;
      }
      auto [owner, fresh] = example_owner.emplace(ex, def.canonical_form);
      if (!fresh && owner->second != def.canonical_form) {
        diags.push_back(at(def.loc, Severity::kWarning,
                           "example \"" + ex + "\" appears under both '" + owner->second + "' and '" +
                               def.canonical_form + "'"));
      }
    }
  }

  std::map<std::string, const BotMessageDef*> bot_forms;
  for (const BotMessageDef& def : script.bot_defs) {
    auto [it, inserted] = bot_forms.emplace(def.canonical_form, &def);
    if (!inserted) {
      const SourceLoc& first = it->second->loc;
      diags.push_back(at(def.loc, Severity::kError,
                         "duplicate bot canonical form '" + def.canonical_form + "' (first defined at " +
                             first.file + ":" + std::to_string(first.line) + ")"));
    }
  }

  for (const FlowDef& flow : script.flows) {
    std::vector<std::pair<std::string, bool>> forms;
    collect_forms(flow.elements, forms);
    std::set<std::string> reported;
    for (const auto& [form, is_user] : forms) {
      if (!reported.insert((is_user ? "u:" : "b:") + form).second) continue;
      if (is_user) {
        auto it = user_forms.find(form);
        if (it == user_forms.end() || it->second->examples.empty()) {
          diags.push_back(at(flow.loc, Severity::kWarning,
                             "flow '" + flow.name + "' matches user form '" + form +
                                 "' which has no example utterances"));
        }
      } else if (!bot_forms.count(form)) {
        diags.push_back(at(flow.loc, Severity::kWarning,
                           "flow '" + flow.name + "' emits bot form '" + form +
                               "' with no definition; the message will be generated"));
      }
    }
  }
  return diags;
}

}  // namespace railgate::colang
