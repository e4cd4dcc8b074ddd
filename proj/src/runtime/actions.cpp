// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/runtime/actions.hpp"

namespace railgate::runtime {

Value ActionCall::arg(const std::string& name) const {
  auto it = args.find(name);
  return it == args.end() ? Value{} : it->second;
}

Value ActionCall::get(const std::string& key) const {
  auto it = context.find(key);
  return it == context.end() ? Value{} : it->second;
}

void ActionRegistry::add(std::string_view name, Action action) {
  std::string key = colang::normalize_action_name(name);
  if (key.empty()) throw std::invalid_argument("action name is empty");
  if (!action) throw std::invalid_argument("action '" + key + "' has no implementation");
  if (!actions_.emplace(key, std::move(action)).second) {
    throw std::invalid_argument("action '" + key + "' is already registered");
  }
}

const Action* ActionRegistry::find(std::string_view name) const {
  auto it = actions_.find(colang::normalize_action_name(name));
  return it == actions_.end() ? nullptr : &it->second;
}

std::vector<std::string> ActionRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : actions_) out.push_back(k);
  return out;
}

void register_builtin_actions(ActionRegistry& registry) {
  registry.add("retrieve_relevant_chunks", [](ActionCall& call) -> Value {
    const auto& kb = call.services.indexes.knowledge;
    const std::string query = to_display(call.get("last_user_message"));
    if (kb.empty() || query.find_first_not_of(" \t\r\n") == std::string::npos) return {};
    const int k = std::max(1, call.services.retrieval.k_examples);
    std::string out;
    for (const auto& n : embedding::knn(kb, query, k, call.services.embedder)) {
      if (!out.empty()) out += "\n\n";
      out += n.item->text;
    }
    return out;
  });
}

}  // namespace railgate::runtime
