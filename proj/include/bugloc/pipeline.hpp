#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "bugloc/chunker.hpp"
#include "bugloc/config.hpp"
#include "bugloc/corpus.hpp"
#include "bugloc/lexical.hpp"
#include "bugloc/vector.hpp"

namespace bugloc {

inline constexpr int kIndexFormatVersion = 1;

struct Manifest {
  int format_version = kIndexFormatVersion;
  int tokenizer_version = kTokenizerVersion;
  std::string version_id;
  std::string config_hash;
  std::string provider;
  std::size_t dimension = 0;
  std::size_t lexical_docs = 0;
  std::size_t chunks = 0;
  std::string lexical_built_at;
  std::string vector_built_at;
};

nlohmann::json to_json(const Manifest& manifest);
Manifest manifest_from_json(const nlohmann::json& doc);

struct SnapshotIndex {
  LexicalIndex lexical;
  VectorIndex vectors;
  Manifest manifest;
};

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingConfig& config);

/// Chunks one file according to `config.mode`. Files in unsupported
/// languages get no spans and therefore split at window boundaries.
std::vector<Chunk> chunk_file(const std::string& path, const std::string& text,
                              const std::string& language, const ChunkingConfig& config);

std::vector<Chunk> chunk_snapshot(const SnapshotFiles& snapshot, const ChunkingConfig& config);

SnapshotIndex build_snapshot_index(const SnapshotFiles& snapshot, const Config& config,
                                   EmbeddingProvider& provider);

/// Loads the index stored in `dir` when its manifest matches the snapshot
/// version and config hash, otherwise builds and persists a fresh one.
/// `rebuilt` reports which path was taken.
SnapshotIndex open_or_build_index(const std::filesystem::path& dir, const SnapshotFiles& snapshot,
                                  const Config& config, EmbeddingProvider& provider,
                                  bool* rebuilt = nullptr);

void save_index(const std::filesystem::path& dir, const SnapshotIndex& index);
SnapshotIndex load_index(const std::filesystem::path& dir);

std::string utc_timestamp();

}  // namespace bugloc
