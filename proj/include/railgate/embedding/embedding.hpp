// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "railgate/errors.hpp"

namespace railgate::embedding {

struct EmbeddingVector {
  std::vector<double> values;

  size_t dim() const { return values.size(); }
  double norm() const;
  bool operator==(const EmbeddingVector&) const = default;
};

class EmptyTextError : public std::invalid_argument {
 public:
  EmptyTextError() : std::invalid_argument("cannot embed empty text") {}
};

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(size_t a, size_t b)
      : std::invalid_argument("embedding dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

/// Maps text to fixed-dimension vectors. Implementations must be safe to call
/// from several threads at once.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual size_t dim() const = 0;
  virtual EmbeddingVector embed(std::string_view text) = 0;

  /// Providers with a batch endpoint override this; the default embeds one
  /// text at a time.
  virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts);
};

/// Validated embedding: rejects blank text, wrong dimensions and zero vectors.
EmbeddingVector embed_text(EmbeddingProvider& provider, std::string_view text);

/// dot(a, b) / (|a| |b|). Throws DimensionMismatch, and std::invalid_argument
/// for zero vectors.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// Offline embedder: character trigrams of the lowercased, whitespace-collapsed
/// text (padded with one space on each side) are hashed with 64-bit FNV-1a into
/// `dim` buckets, counted, and L2-normalized. Distinct texts can collide into
/// the same bucket; identical texts always produce identical vectors.
class HashEmbedder : public EmbeddingProvider {
 public:
  explicit HashEmbedder(size_t dim = 256);

  std::string name() const override { return "hash"; }
  size_t dim() const override { return dim_; }
  EmbeddingVector embed(std::string_view text) override;

 private:
  size_t dim_;
};

/// Explicit text -> vector table, for constructing exact similarities in tests
/// and fixtures. Unknown texts go to `fallback` if set, else throw ProviderError.
class TableEmbedder : public EmbeddingProvider {
 public:
  TableEmbedder(size_t dim, std::shared_ptr<EmbeddingProvider> fallback = nullptr);

  void set(std::string text, std::vector<double> values);

  std::string name() const override { return "table"; }
  size_t dim() const override { return dim_; }
  EmbeddingVector embed(std::string_view text) override;

 private:
  size_t dim_;
  std::shared_ptr<EmbeddingProvider> fallback_;
  std::mutex mu_;
  std::map<std::string, EmbeddingVector, std::less<>> table_;
};

/// Memoizes another provider; also counts calls that reached it.
class CachingEmbedder : public EmbeddingProvider {
 public:
  explicit CachingEmbedder(std::shared_ptr<EmbeddingProvider> inner);

  std::string name() const override { return inner_->name(); }
  size_t dim() const override { return inner_->dim(); }
  EmbeddingVector embed(std::string_view text) override;
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

  size_t misses() const;

 private:
  std::shared_ptr<EmbeddingProvider> inner_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, EmbeddingVector> cache_;
  size_t misses_ = 0;
};

struct HttpEmbedderSettings {
  std::string endpoint;  // full URL of the embeddings route
  std::string model;
  size_t dim = 0;
  std::string api_key;  // sent as "Authorization: Bearer <key>" when set
  std::chrono::milliseconds timeout{30000};
};

/// Speaks `{"input": [...], "model": m}` -> `{"data": [{"embedding": [...]}]}`.
class HttpEmbedder : public EmbeddingProvider {
 public:
  explicit HttpEmbedder(HttpEmbedderSettings settings);

  std::string name() const override { return "http:" + settings_.model; }
  size_t dim() const override { return settings_.dim; }
  EmbeddingVector embed(std::string_view text) override;
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

 private:
  HttpEmbedderSettings settings_;
};

}  // namespace railgate::embedding
