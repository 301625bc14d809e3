#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bugloc/chunker.hpp"
#include "bugloc/contrastive.hpp"
#include "bugloc/lexical.hpp"

namespace bugloc {

enum class ChunkingMode { kStatic, kSliding, kDynamic };

std::string_view to_string(ChunkingMode mode);
ChunkingMode chunking_mode_from_string(std::string_view name);

struct ChunkingConfig {
  ChunkingMode mode = ChunkingMode::kDynamic;
  std::size_t window_size = 40;  // lines
  double tokens_per_line = 12.0;
  std::size_t stride = 20;  // sliding mode only
  double default_cost = kDefaultSplitCost;
  KindCosts kind_costs = default_kind_costs();
};

struct EmbeddingConfig {
  std::string provider = "builtin";  // builtin | remote
  std::string endpoint;
  std::size_t dimension = kDefaultDimension;
  std::size_t batch_size = 32;
  int timeout_seconds = 60;
};

struct Config {
  ChunkingConfig chunking;
  Bm25Params bm25;
  double rrf_k = 60.0;
  std::size_t lexical_depth = 500;
  std::size_t deep_depth = 500;
  std::size_t eval_depth = 100;
  EmbeddingConfig embedding;
  LossParams loss;
  std::vector<std::string> include_globs;
  std::uint64_t seed = 42;

  Config();
};

/// Throws Error(kUsage) naming the first field outside its range.
void validate(const Config& config);

nlohmann::json to_json(const Config& config);

/// Missing keys keep their defaults; unknown keys are rejected.
Config config_from_json(const nlohmann::json& doc);
Config load_config(const std::filesystem::path& path);

/// Stable hash of the canonical JSON form, as 16 hex digits.
std::string config_hash(const Config& config);

/// Conservative line budget for a model context of `context_tokens`.
std::size_t window_from_tokens(std::size_t context_tokens, double tokens_per_line);

}  // namespace bugloc
