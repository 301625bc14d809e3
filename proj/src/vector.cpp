#include "bugloc/vector.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <httplib.h>

#include "bugloc/error.hpp"
#include "bugloc/lexical.hpp"
#include "bugloc/text.hpp"

namespace bugloc {
using nlohmann::json;

namespace {

constexpr std::uint64_t kBucketSeed = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kSignSeed = 0xc2b2ae3d27d4eb4fULL;
constexpr double kUnitTolerance = 1e-6;

bool ordered_hit(const ChunkHit& a, const ChunkHit& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.chunk_id < b.chunk_id;
}

struct ParsedEndpoint {
  std::string host;  // scheme://host:port
  std::string path;
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
  const std::size_t scheme = endpoint.find("://");
  if (scheme == std::string::npos || endpoint.substr(0, scheme) != "http")
    throw usage_error("embedding endpoint must be an http:// URL: " + endpoint);
  const std::size_t slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void normalize(Embedding& v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw data_error("embedding has a non-finite entry");
  }
  const double n = l2_norm(v);
  if (n == 0.0) throw data_error("cannot normalize a zero embedding");
  for (double& x : v) x /= n;
}

Embedding EmbeddingProvider::embed_one(const std::string& text) {
  auto out = embed({text});
  if (out.size() != 1) throw provider_error(name() + " returned no embedding");
  return std::move(out.front());
}

Embedding reference_features(std::string_view text, std::size_t dimension) {
  if (dimension == 0) throw usage_error("embedding dimension must be >= 1");
  Embedding v(dimension, 0.0);
  for (const auto& token : tokenize(text)) {
    const std::size_t bucket = fnv1a64(token, kBucketSeed) % dimension;
    const double sign = (fnv1a64(token, kSignSeed) >> 63) != 0 ? -1.0 : 1.0;
    v[bucket] += sign;
  }
  return v;
}

Embedding reference_embed(std::string_view text, std::size_t dimension) {
  Embedding v = reference_features(text, dimension);
  const double n = l2_norm(v);
  if (n == 0.0) {
    v[0] = 1.0;
    return v;
  }
  for (double& x : v) x /= n;
  return v;
}

std::vector<Embedding> ReferenceEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(reference_embed(t, dimension_));
  return out;
}

std::vector<Embedding> remote_embed(const std::string& endpoint,
                                    const std::vector<std::string>& texts, std::size_t dimension,
                                    int timeout_seconds) {
  const ParsedEndpoint ep = parse_endpoint(endpoint);
  httplib::Client client(ep.host);
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  client.set_write_timeout(timeout_seconds, 0);

  const json request = {{"texts", texts}};
  auto res = client.Post(ep.path, request.dump(), "application/json");
  if (!res) {
    throw provider_error("embedding request to " + endpoint +
                         " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw provider_error("embedding endpoint " + endpoint + " returned HTTP " +
                         std::to_string(res->status));
  }
  json body;
  try {
    body = json::parse(res->body);
  } catch (const json::exception& e) {
    throw provider_error(std::string("embedding response is not JSON: ") + e.what());
  }
  if (!body.is_object() || !body.contains("embeddings") || !body["embeddings"].is_array())
    throw provider_error("embedding response lacks an 'embeddings' array");
  const json& arr = body["embeddings"];
  if (arr.size() != texts.size()) {
    throw provider_error("embedding response has " + std::to_string(arr.size()) +
                         " vectors for " + std::to_string(texts.size()) + " texts");
  }
  std::vector<Embedding> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& row = arr[i];
    if (!row.is_array()) throw provider_error("embedding " + std::to_string(i) + " is not an array");
    if (row.size() != dimension) {
      throw provider_error("embedding " + std::to_string(i) + " has dimension " +
                           std::to_string(row.size()) + ", expected " + std::to_string(dimension));
    }
    Embedding v;
    v.reserve(dimension);
    for (const auto& x : row) {
      if (!x.is_number()) throw provider_error("embedding " + std::to_string(i) + " has a non-numeric entry");
      v.push_back(x.get<double>());
    }
    if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); }))
      throw provider_error("embedding " + std::to_string(i) + " has a non-finite entry");
    if (l2_norm(v) == 0.0) throw provider_error("embedding " + std::to_string(i) + " is the zero vector");
    normalize(v);
    out.push_back(std::move(v));
  }
  return out;
}

RemoteEmbedder::RemoteEmbedder(std::string endpoint, std::size_t dimension, std::size_t batch_size,
                               int timeout_seconds)
    : endpoint_(std::move(endpoint)),
      dimension_(dimension),
      batch_size_(std::max<std::size_t>(1, batch_size)),
      timeout_seconds_(timeout_seconds) {
  parse_endpoint(endpoint_);
}

std::vector<Embedding> RemoteEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += batch_size_) {
    const std::size_t end = std::min(texts.size(), start + batch_size_);
    const std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                         texts.begin() + static_cast<std::ptrdiff_t>(end));
    try {
      auto part = remote_embed(endpoint_, batch, dimension_, timeout_seconds_);
      for (auto& v : part) out.push_back(std::move(v));
    } catch (const Error& e) {
      throw Error(e.kind(), "batch starting at text " + std::to_string(start) + ": " + e.what());
    }
  }
  return out;
}

VectorIndex::VectorIndex(std::size_t dimension, std::string provider_name)
    : dimension_(dimension), provider_name_(std::move(provider_name)) {
  if (dimension_ == 0) throw usage_error("vector index dimension must be >= 1");
}

void VectorIndex::add(VectorEntry entry) {
  if (entry.embedding.size() != dimension_) {
    throw data_error("chunk " + std::to_string(entry.chunk_id) + " has dimension " +
                     std::to_string(entry.embedding.size()) + ", index expects " +
                     std::to_string(dimension_));
  }
  if (std::abs(l2_norm(entry.embedding) - 1.0) > kUnitTolerance)
    throw data_error("chunk " + std::to_string(entry.chunk_id) + " embedding is not unit-norm");
  const auto pos = std::lower_bound(seen_ids_.begin(), seen_ids_.end(), entry.chunk_id);
  if (pos != seen_ids_.end() && *pos == entry.chunk_id)
    throw data_error("duplicate chunk id " + std::to_string(entry.chunk_id));
  seen_ids_.insert(pos, entry.chunk_id);
  entries_.push_back(std::move(entry));
}

VectorIndex VectorIndex::build(const std::vector<Chunk>& chunks, EmbeddingProvider& provider,
                               std::size_t batch_size) {
  if (chunks.empty()) throw data_error("cannot build a vector index without chunks");
  VectorIndex index(provider.dimension(), provider.name());
  batch_size = std::max<std::size_t>(1, batch_size);
  for (std::size_t start = 0; start < chunks.size(); start += batch_size) {
    const std::size_t end = std::min(chunks.size(), start + batch_size);
    std::vector<std::string> texts;
    for (std::size_t i = start; i < end; ++i) texts.push_back(chunks[i].text);
    std::vector<Embedding> vecs;
    try {
      vecs = provider.embed(texts);
    } catch (const Error& e) {
      throw Error(e.kind(), "embedding chunk " + std::to_string(start) + " (" +
                                chunks[start].file_path + ":" +
                                std::to_string(chunks[start].start_line) + "): " + e.what());
    }
    if (vecs.size() != texts.size())
      throw provider_error("provider returned " + std::to_string(vecs.size()) + " embeddings for " +
                           std::to_string(texts.size()) + " chunks starting at chunk " +
                           std::to_string(start));
    for (std::size_t i = start; i < end; ++i) {
      index.add({static_cast<std::uint32_t>(i), chunks[i].file_path, chunks[i].start_line,
                 chunks[i].end_line, std::move(vecs[i - start])});
    }
  }
  return index;
}

std::vector<ChunkHit> VectorIndex::search(std::span<const double> query, std::size_t top_k) const {
  if (query.size() != dimension_) {
    throw data_error("query dimension " + std::to_string(query.size()) + " does not match index " +
                     std::to_string(dimension_));
  }
  if (std::abs(l2_norm(query) - 1.0) > kUnitTolerance) throw data_error("query embedding is not unit-norm");
  std::vector<ChunkHit> hits;
  hits.reserve(entries_.size());
  for (const auto& e : entries_) {
    const double sim = dot(query, e.embedding);
    if (sim < -1.0 - kUnitTolerance || sim > 1.0 + kUnitTolerance)
      throw data_error("cosine similarity out of range for chunk " + std::to_string(e.chunk_id));
    hits.push_back({e.chunk_id, e.file_id, sim});
  }
  const std::size_t k = std::min(top_k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), ordered_hit);
  hits.resize(k);
  return hits;
}

json VectorIndex::to_json() const {
  json entries = json::array();
  for (const auto& e : entries_) {
    entries.push_back({{"chunk_id", e.chunk_id},
                       {"file_id", e.file_id},
                       {"start_line", e.start_line},
                       {"end_line", e.end_line},
                       {"embedding", e.embedding}});
  }
  return {{"dimension", dimension_}, {"provider", provider_name_}, {"entries", std::move(entries)}};
}

VectorIndex VectorIndex::from_json(const json& doc) {
  VectorIndex index(doc.at("dimension").get<std::size_t>(), doc.at("provider").get<std::string>());
  for (const auto& e : doc.at("entries")) {
    index.add({e.at("chunk_id").get<std::uint32_t>(), e.at("file_id").get<std::string>(),
               e.at("start_line").get<std::size_t>(), e.at("end_line").get<std::size_t>(),
               e.at("embedding").get<Embedding>()});
  }
  return index;
}

RankedList aggregate_file_scores(const std::vector<ChunkHit>& hits) {
  std::map<std::string, double> best;
  for (const auto& h : hits) {
    auto [it, inserted] = best.emplace(h.file_id, h.similarity);
    if (!inserted) it->second = std::max(it->second, h.similarity);
  }
  RankedList out;
  out.retriever = "deep";
  for (const auto& [file, score] : best) out.items.push_back({file, score});
  std::stable_sort(out.items.begin(), out.items.end(),
                   [](const RankedItem& a, const RankedItem& b) { return a.score > b.score; });
  return out;
}

}  // namespace bugloc
