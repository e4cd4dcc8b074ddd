// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/embedding/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>

#include "json.hpp"
#include "railgate/net/http_client.hpp"

namespace railgate::embedding {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string normalize_for_hash(std::string_view text) {
  std::string out = " ";
  bool space = true;
  for (char c : trim(text)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!space) out.push_back(' ');
      space = true;
      continue;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    space = false;
  }
  if (out.back() != ' ') out.push_back(' ');
  return out;
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void normalize(std::vector<double>& v) {
  double sq = 0;
  for (double x : v) sq += x * x;
  const double n = std::sqrt(sq);
  if (n > 0) {
    for (double& x : v) x /= n;
  }
}

}  // namespace

double EmbeddingVector::norm() const {
  double sq = 0;
  for (double x : values) sq += x * x;
  return std::sqrt(sq);
}

std::vector<EmbeddingVector> EmbeddingProvider::embed_batch(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

EmbeddingVector embed_text(EmbeddingProvider& provider, std::string_view text) {
  if (trim(text).empty()) throw EmptyTextError();
  EmbeddingVector v = provider.embed(text);
  if (v.dim() != provider.dim()) throw DimensionMismatch(v.dim(), provider.dim());
  if (!(v.norm() > 0)) throw ProviderError("provider '" + provider.name() + "' returned a zero vector", false);
  return v;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0 || nb == 0) throw std::invalid_argument("cosine similarity of a zero vector");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

// ---------------------------------------------------------------------------

HashEmbedder::HashEmbedder(size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
}

EmbeddingVector HashEmbedder::embed(std::string_view text) {
  if (trim(text).empty()) throw EmptyTextError();
  const std::string s = normalize_for_hash(text);
  std::vector<double> v(dim_, 0.0);
  for (size_t i = 0; i + 3 <= s.size(); ++i) v[fnv1a(std::string_view(s).substr(i, 3)) % dim_] += 1.0;
  normalize(v);
  return EmbeddingVector{std::move(v)};
}

// ---------------------------------------------------------------------------

TableEmbedder::TableEmbedder(size_t dim, std::shared_ptr<EmbeddingProvider> fallback)
    : dim_(dim), fallback_(std::move(fallback)) {
  if (fallback_ && fallback_->dim() != dim_) throw DimensionMismatch(dim_, fallback_->dim());
}

void TableEmbedder::set(std::string text, std::vector<double> values) {
  if (values.size() != dim_) throw DimensionMismatch(values.size(), dim_);
  std::lock_guard lock(mu_);
  table_[std::move(text)] = EmbeddingVector{std::move(values)};
}

EmbeddingVector TableEmbedder::embed(std::string_view text) {
  {
    std::lock_guard lock(mu_);
    auto it = table_.find(text);
    if (it != table_.end()) return it->second;
  }
  if (fallback_) return fallback_->embed(text);
  throw ProviderError("no table entry for \"" + std::string(text) + "\"", false);
}

// ---------------------------------------------------------------------------

CachingEmbedder::CachingEmbedder(std::shared_ptr<EmbeddingProvider> inner) : inner_(std::move(inner)) {}

EmbeddingVector CachingEmbedder::embed(std::string_view text) {
  std::string key(text);
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  EmbeddingVector v = inner_->embed(text);
  std::lock_guard lock(mu_);
  ++misses_;
  return cache_.emplace(std::move(key), std::move(v)).first->second;
}

std::vector<EmbeddingVector> CachingEmbedder::embed_batch(std::span<const std::string> texts) {
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mu_);
    for (const auto& t : texts) {
      if (!cache_.count(t)) missing.push_back(t);
    }
  }
  if (!missing.empty()) {
    auto vectors = inner_->embed_batch(missing);
    std::lock_guard lock(mu_);
    for (size_t i = 0; i < missing.size(); ++i) {
      if (cache_.emplace(missing[i], std::move(vectors[i])).second) ++misses_;
    }
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  std::lock_guard lock(mu_);
  for (const auto& t : texts) out.push_back(cache_.at(t));
  return out;
}

size_t CachingEmbedder::misses() const {
  std::lock_guard lock(mu_);
  return misses_;
}

// ---------------------------------------------------------------------------

HttpEmbedder::HttpEmbedder(HttpEmbedderSettings settings) : settings_(std::move(settings)) {
  if (settings_.model.empty()) throw ConfigError("remote embedding provider needs an explicit model name");
  if (settings_.dim == 0) throw ConfigError("remote embedding provider needs a positive 'dim'");
  net::parse_url(settings_.endpoint);
}

EmbeddingVector HttpEmbedder::embed(std::string_view text) {
  std::vector<std::string> one{std::string(text)};
  return embed_batch(one).front();
}

std::vector<EmbeddingVector> HttpEmbedder::embed_batch(std::span<const std::string> texts) {
  nlohmann::json request = {{"input", std::vector<std::string>(texts.begin(), texts.end())},
                            {"model", settings_.model}};
  std::vector<std::pair<std::string, std::string>> headers;
  if (!settings_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + settings_.api_key);
  auto res = net::post_json(net::parse_url(settings_.endpoint), request.dump(), headers, settings_.timeout);
  if (res.status < 200 || res.status >= 300) {
    throw ProviderError("embedding request failed with HTTP " + std::to_string(res.status),
                        net::is_retryable_status(res.status), res.status);
  }
  std::vector<EmbeddingVector> out;
  try {
    auto doc = nlohmann::json::parse(res.body);
    for (const auto& item : doc.at("data")) out.push_back(EmbeddingVector{item.at("embedding").get<std::vector<double>>()});
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed embedding response: ") + e.what(), false, res.status);
  }
  if (out.size() != texts.size()) {
    throw ProviderError("embedding response has " + std::to_string(out.size()) + " vectors for " +
                            std::to_string(texts.size()) + " inputs",
                        false, res.status);
  }
  for (const auto& v : out) {
    if (v.dim() != settings_.dim) throw DimensionMismatch(v.dim(), settings_.dim);
  }
  return out;
}

}  // namespace railgate::embedding
