#include "bugloc/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "bugloc/components.hpp"
#include "bugloc/error.hpp"
#include "bugloc/text.hpp"

namespace bugloc {
namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const Manifest& m) {
  return {{"format_version", m.format_version},
          {"tokenizer_version", m.tokenizer_version},
          {"version_id", m.version_id},
          {"config_hash", m.config_hash},
          {"provider", m.provider},
          {"dimension", m.dimension},
          {"lexical_docs", m.lexical_docs},
          {"chunks", m.chunks},
          {"lexical_built_at", m.lexical_built_at},
          {"vector_built_at", m.vector_built_at}};
}

Manifest manifest_from_json(const json& doc) {
  try {
    Manifest m;
    m.format_version = doc.at("format_version").get<int>();
    m.tokenizer_version = doc.at("tokenizer_version").get<int>();
    m.version_id = doc.at("version_id").get<std::string>();
    m.config_hash = doc.at("config_hash").get<std::string>();
    m.provider = doc.at("provider").get<std::string>();
    m.dimension = doc.at("dimension").get<std::size_t>();
    m.lexical_docs = doc.at("lexical_docs").get<std::size_t>();
    m.chunks = doc.at("chunks").get<std::size_t>();
    m.lexical_built_at = doc.at("lexical_built_at").get<std::string>();
    m.vector_built_at = doc.at("vector_built_at").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw data_error(std::string("malformed manifest: ") + e.what());
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03lldZ", buf, static_cast<long long>(ms));
  return out;
}

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingConfig& config) {
  if (config.provider == "builtin") return std::make_unique<ReferenceEmbedder>(config.dimension);
  if (config.provider == "remote") {
    return std::make_unique<RemoteEmbedder>(config.endpoint, config.dimension, config.batch_size,
                                            config.timeout_seconds);
  }
  throw usage_error("unknown embedding provider '" + config.provider + "'");
}

std::vector<Chunk> chunk_file(const std::string& path, const std::string& text,
                              const std::string& language, const ChunkingConfig& config) {
  const std::size_t total = count_lines(text);
  if (total == 0) return {};
  switch (config.mode) {
    case ChunkingMode::kStatic:
      return apply_plan(text, static_chunk(total, config.window_size), path);
    case ChunkingMode::kSliding:
      return sliding_chunk(text, config.window_size, config.stride, path);
    case ChunkingMode::kDynamic: {
      const ExtractionResult spans = extract_components(text, language);
      const SplitCostMap costs =
          build_cost_map(spans.spans, total, config.kind_costs, config.default_cost);
      return apply_plan(text, dynamic_chunk(costs, config.window_size), path);
    }
  }
  return {};
}

std::vector<Chunk> chunk_snapshot(const SnapshotFiles& snapshot, const ChunkingConfig& config) {
  std::vector<Chunk> chunks;
  for (const auto& [path, text] : snapshot.files) {
    const auto lang = snapshot.language_of.find(path);
    try {
      auto part = chunk_file(path, text, lang == snapshot.language_of.end() ? "unknown" : lang->second,
                             config);
      for (auto& c : part) chunks.push_back(std::move(c));
    } catch (const Error& e) {
      throw Error(e.kind(), path + ": " + e.what());
    }
  }
  return chunks;
}

SnapshotIndex build_snapshot_index(const SnapshotFiles& snapshot, const Config& config,
                                   EmbeddingProvider& provider) {
  std::vector<LexicalDoc> docs;
  for (const auto& [path, text] : snapshot.files) docs.push_back({path, text, path});
  LexicalIndex lexical = LexicalIndex::build(docs, config.bm25);
  const std::string lexical_at = utc_timestamp();

  const std::vector<Chunk> chunks = chunk_snapshot(snapshot, config.chunking);
  VectorIndex vectors = VectorIndex::build(chunks, provider, config.embedding.batch_size);
  const std::string vector_at = utc_timestamp();

  Manifest m;
  m.version_id = snapshot.version_id;
  m.config_hash = config_hash(config);
  m.provider = provider.name();
  m.dimension = provider.dimension();
  m.lexical_docs = lexical.doc_count();
  m.chunks = vectors.size();
  m.lexical_built_at = lexical_at;
  m.vector_built_at = vector_at;
  return {std::move(lexical), std::move(vectors), std::move(m)};
}

namespace {

void write_json(const fs::path& path, const json& doc) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot write " + tmp.string());
    out << doc.dump();
    if (!out) throw data_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw data_error(path.string() + ": " + e.what());
  }
}

}  // namespace

void save_index(const fs::path& dir, const SnapshotIndex& index) {
  fs::create_directories(dir);
  write_json(dir / "lexical.json", index.lexical.to_json());
  write_json(dir / "vectors.json", index.vectors.to_json());
  // Manifest last: its presence marks a complete index.
  write_json(dir / "manifest.json", to_json(index.manifest));
}

SnapshotIndex load_index(const fs::path& dir) {
  Manifest m = manifest_from_json(read_json(dir / "manifest.json"));
  if (m.format_version != kIndexFormatVersion) throw data_error("unsupported index format version");
  LexicalIndex lexical = LexicalIndex::from_json(read_json(dir / "lexical.json"));
  VectorIndex vectors = VectorIndex::from_json(read_json(dir / "vectors.json"));
  return {std::move(lexical), std::move(vectors), std::move(m)};
}

SnapshotIndex open_or_build_index(const fs::path& dir, const SnapshotFiles& snapshot,
                                  const Config& config, EmbeddingProvider& provider, bool* rebuilt) {
  const fs::path manifest_path = dir / "manifest.json";
  if (fs::exists(manifest_path)) {
    try {
      const Manifest m = manifest_from_json(read_json(manifest_path));
      if (m.format_version == kIndexFormatVersion && m.tokenizer_version == kTokenizerVersion &&
          m.version_id == snapshot.version_id && m.config_hash == config_hash(config) &&
          m.provider == provider.name()) {
        SnapshotIndex loaded = load_index(dir);
        if (rebuilt) *rebuilt = false;
        return loaded;
      }
    } catch (const Error&) {
      // Fall through to a rebuild.
    }
  }
  SnapshotIndex index = build_snapshot_index(snapshot, config, provider);
  save_index(dir, index);
  if (rebuilt) *rebuilt = true;
  return index;
}

}  // namespace bugloc
