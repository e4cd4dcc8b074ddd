// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "railgate/colang/ast.hpp"
#include "railgate/embedding/embedding.hpp"

namespace railgate::embedding {

enum class ItemKind { kUserExample, kFlow, kBotExample, kKnowledgeChunk };

const char* item_kind_name(ItemKind kind);

struct IndexedItem {
  int id = 0;
  ItemKind kind = ItemKind::kUserExample;
  std::string text;     // utterance, rendered flow body, bot utterance, or chunk
  std::string payload;  // canonical form or flow name
  EmbeddingVector vector;
};

struct Neighbor {
  const IndexedItem* item = nullptr;
  double score = 0.0;
};

struct RetrievalConfig {
  int k_examples = 5;
  std::optional<double> similarity_threshold = 0.6;  // unset means exact matching only
  std::optional<int> max_per_form;  // unset means every example
};

/// Exact cosine index. Immutable once built; concurrent reads are safe.
class EmbeddingIndex {
 public:
  /// Returns the new item's id (dense, starting at 0). All vectors must share
  /// one dimension and be nonzero.
  int add(ItemKind kind, std::string text, std::string payload, EmbeddingVector vector);

  const std::vector<IndexedItem>& items() const { return items_; }
  size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  /// Top min(k, size) items by descending cosine score; equal scores are
  /// ordered by ascending id. Items rejected by `keep` are skipped.
  std::vector<Neighbor> search(const EmbeddingVector& query, int k,
                               const std::function<bool(const IndexedItem&)>& keep = nullptr) const;

 private:
  std::vector<IndexedItem> items_;
  std::vector<double> norms_;
};

/// Embeds `query_text` and searches. An empty index returns {} without calling
/// the provider. Throws std::invalid_argument when k < 1.
std::vector<Neighbor> knn(const EmbeddingIndex& index, std::string_view query_text, int k,
                          EmbeddingProvider& provider,
                          const std::function<bool(const IndexedItem&)>& keep = nullptr);

struct IndexSet {
  EmbeddingIndex user_examples;  // text: utterance, payload: canonical form
  EmbeddingIndex flows;          // text: rendered flow body, payload: flow name
  EmbeddingIndex bot_examples;   // text: utterance, payload: canonical form (vector of the form)
  EmbeddingIndex knowledge;      // text: knowledge-base chunk
};

/// Builds the retrieval indexes for a script. `max_per_form` keeps the first N
/// examples of each user canonical form. Rail flows (wildcard first element)
/// are not indexed as flow examples.
IndexSet build_indexes(const colang::Script& script, EmbeddingProvider& provider,
                       const RetrievalConfig& config = {},
                       const std::vector<std::string>& knowledge_chunks = {});

struct FormMatch {
  std::string form;
  double score = 1.0;
  bool exact = false;
};

/// Exact string match first (no embedding calls). Otherwise the highest-scoring
/// defined form is returned iff its cosine score >= threshold; equal scores go
/// to the earlier definition. Thresholds above 1 only admit exact string
/// matches.
std::optional<FormMatch> similarity_match(std::string_view candidate, const std::vector<std::string>& defined_forms,
                                          double threshold, EmbeddingProvider& provider);

}  // namespace railgate::embedding
