#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bugloc/chunker.hpp"
#include "bugloc/ranked_list.hpp"

namespace bugloc {

using Embedding = std::vector<double>;

inline constexpr std::size_t kDefaultDimension = 256;

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

/// In-place L2 normalization. Throws Error(kData) on non-finite entries or a
/// zero vector.
void normalize(Embedding& v);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual bool deterministic() const = 0;

  /// Unit-norm embeddings, one per input, in input order.
  virtual std::vector<Embedding> embed(const std::vector<std::string>& texts) = 0;

  Embedding embed_one(const std::string& text);
};

/// Hashed bag of tokens: each token lands in bucket h1 mod d with sign from
/// h2, counts accumulate and the result is L2-normalized. Text with no tokens
/// (or whose buckets cancel) maps to the first basis vector.
Embedding reference_embed(std::string_view text, std::size_t dimension = kDefaultDimension);

/// Raw (unnormalized) hashed counts used as features by trainable embedders.
Embedding reference_features(std::string_view text, std::size_t dimension = kDefaultDimension);

class ReferenceEmbedder final : public EmbeddingProvider {
 public:
  explicit ReferenceEmbedder(std::size_t dimension = kDefaultDimension) : dimension_(dimension) {}

  std::string name() const override { return "reference-hash-v1"; }
  std::size_t dimension() const override { return dimension_; }
  bool deterministic() const override { return true; }
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;

 private:
  std::size_t dimension_;
};

/// HTTP JSON provider: POST {"texts": [...]} to the endpoint, expect
/// {"embeddings": [[...], ...]}. Requests are split into batches of
/// `batch_size`; every vector is checked for dimension and finiteness before
/// normalization and failures name the batch position.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  RemoteEmbedder(std::string endpoint, std::size_t dimension, std::size_t batch_size = 32,
                 int timeout_seconds = 60);

  std::string name() const override { return "remote:" + endpoint_; }
  std::size_t dimension() const override { return dimension_; }
  bool deterministic() const override { return false; }
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;

 private:
  std::string endpoint_;
  std::size_t dimension_;
  std::size_t batch_size_;
  int timeout_seconds_;
};

/// Single request/response exchange; exposed for testing against stubs.
std::vector<Embedding> remote_embed(const std::string& endpoint,
                                    const std::vector<std::string>& texts,
                                    std::size_t dimension, int timeout_seconds = 60);

struct VectorEntry {
  std::uint32_t chunk_id = 0;
  std::string file_id;
  std::size_t start_line = 0;
  std::size_t end_line = 0;
  Embedding embedding;
};

struct ChunkHit {
  std::uint32_t chunk_id = 0;
  std::string file_id;
  double similarity = 0.0;
};

/// Exact cosine top-k over unit-norm chunk embeddings.
class VectorIndex {
 public:
  VectorIndex(std::size_t dimension, std::string provider_name);

  /// Embeds every chunk; chunk ids follow input order. Provider failures are
  /// rethrown naming the first chunk of the failing batch.
  static VectorIndex build(const std::vector<Chunk>& chunks, EmbeddingProvider& provider,
                           std::size_t batch_size = 64);

  void add(VectorEntry entry);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::string& provider_name() const noexcept { return provider_name_; }
  const std::vector<VectorEntry>& entries() const noexcept { return entries_; }

  /// Descending similarity, ties by chunk id ascending.
  std::vector<ChunkHit> search(std::span<const double> query, std::size_t top_k) const;

  nlohmann::json to_json() const;
  static VectorIndex from_json(const nlohmann::json& doc);

 private:
  std::size_t dimension_;
  std::string provider_name_;
  std::vector<VectorEntry> entries_;
  std::vector<std::uint32_t> seen_ids_;  // sorted
};

/// File score = best similarity among its chunk hits; ties by file id.
RankedList aggregate_file_scores(const std::vector<ChunkHit>& hits);

}  // namespace bugloc
