// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/embedding/index.hpp"

#include <algorithm>
#include <map>

#include "railgate/colang/format.hpp"

namespace railgate::embedding {

const char* item_kind_name(ItemKind kind) {
  switch (kind) {
    case ItemKind::kUserExample: return "user_example";
    case ItemKind::kFlow: return "flow";
    case ItemKind::kBotExample: return "bot_example";
    case ItemKind::kKnowledgeChunk: return "knowledge_chunk";
  }
  return "?";
}

int EmbeddingIndex::add(ItemKind kind, std::string text, std::string payload, EmbeddingVector vector) {
  if (!items_.empty() && vector.dim() != items_.front().vector.dim()) {
    throw DimensionMismatch(vector.dim(), items_.front().vector.dim());
  }
  if (!(vector.norm() > 0)) throw std::invalid_argument("cannot index a zero vector");
  const int id = static_cast<int>(items_.size());
  items_.push_back(IndexedItem{id, kind, std::move(text), std::move(payload), std::move(vector)});
  return id;
}

std::vector<Neighbor> EmbeddingIndex::search(const EmbeddingVector& query, int k,
                                             const std::function<bool(const IndexedItem&)>& keep) const {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  std::vector<Neighbor> scored;
  scored.reserve(items_.size());
  for (const IndexedItem& item : items_) {
    if (keep && !keep(item)) continue;
    scored.push_back(Neighbor{&item, cosine_similarity(query, item.vector)});
  }
  const auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item->id < b.item->id;
  };
  const size_t n = std::min(static_cast<size_t>(k), scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);
  scored.resize(n);
  return scored;
}

std::vector<Neighbor> knn(const EmbeddingIndex& index, std::string_view query_text, int k,
                          EmbeddingProvider& provider, const std::function<bool(const IndexedItem&)>& keep) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (index.empty()) return {};
  return index.search(embed_text(provider, query_text), k, keep);
}

IndexSet build_indexes(const colang::Script& script, EmbeddingProvider& provider, const RetrievalConfig& config,
                       const std::vector<std::string>& knowledge_chunks) {
  IndexSet set;
  for (const auto& def : script.user_defs) {
    int taken = 0;
    for (const auto& example : def.examples) {
      if (config.max_per_form && taken >= *config.max_per_form) break;
      set.user_examples.add(ItemKind::kUserExample, example, def.canonical_form, embed_text(provider, example));
      ++taken;
    }
  }
  for (const auto& flow : script.flows) {
    if (flow.is_rail()) continue;
    std::string body = colang::format_elements(flow.elements);
    EmbeddingVector v = embed_text(provider, body);
    set.flows.add(ItemKind::kFlow, std::move(body), flow.name, std::move(v));
  }
  for (const auto& def : script.bot_defs) {
    const EmbeddingVector v = embed_text(provider, def.canonical_form);
    for (const auto& utterance : def.utterances) {
      set.bot_examples.add(ItemKind::kBotExample, utterance, def.canonical_form, v);
    }
  }
  for (const auto& chunk : knowledge_chunks) {
    set.knowledge.add(ItemKind::kKnowledgeChunk, chunk, "", embed_text(provider, chunk));
  }
  return set;
}

std::optional<FormMatch> similarity_match(std::string_view candidate, const std::vector<std::string>& defined_forms,
                                          double threshold, EmbeddingProvider& provider) {
  if (!(threshold >= 0)) throw std::invalid_argument("similarity threshold must be non-negative");
  for (const auto& form : defined_forms) {
    if (form == candidate) return FormMatch{form, 1.0, true};
  }
  if (defined_forms.empty()) return std::nullopt;
  const EmbeddingVector query = embed_text(provider, candidate);
  std::optional<FormMatch> best;
  for (const auto& form : defined_forms) {
    const double score = cosine_similarity(query, embed_text(provider, form));
    if (!best || score > best->score) best = FormMatch{form, score, false};
  }
  if (best && best->score >= threshold) return best;
  return std::nullopt;
}

}  // namespace railgate::embedding
