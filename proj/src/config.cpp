#include "bugloc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "bugloc/corpus.hpp"
#include "bugloc/error.hpp"
#include "bugloc/text.hpp"

namespace bugloc {
using nlohmann::json;

std::string_view to_string(ChunkingMode mode) {
  switch (mode) {
    case ChunkingMode::kStatic: return "static";
    case ChunkingMode::kSliding: return "sliding";
    case ChunkingMode::kDynamic: return "dynamic";
  }
  return "dynamic";
}

ChunkingMode chunking_mode_from_string(std::string_view name) {
  if (name == "static") return ChunkingMode::kStatic;
  if (name == "sliding") return ChunkingMode::kSliding;
  if (name == "dynamic") return ChunkingMode::kDynamic;
  throw usage_error("unknown chunking mode '" + std::string(name) + "'");
}

Config::Config() : include_globs(default_source_globs()) {}

void validate(const Config& c) {
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) throw usage_error("config: " + what);
  };
  require(c.chunking.window_size >= 1, "chunking.window_size must be >= 1");
  require(c.chunking.tokens_per_line > 0.0, "chunking.tokens_per_line must be > 0");
  require(c.chunking.stride >= 1 && c.chunking.stride <= c.chunking.window_size,
          "chunking.stride must be in [1, window_size]");
  require(c.chunking.default_cost > 0.0 && std::isfinite(c.chunking.default_cost),
          "chunking.default_cost must be > 0");
  for (const auto& [kind, cost] : c.chunking.kind_costs) {
    require(cost >= 0.0 && std::isfinite(cost),
            "chunking.kind_costs." + std::string(to_string(kind)) + " must be >= 0");
  }
  require(c.bm25.k1 >= 0.0 && std::isfinite(c.bm25.k1), "bm25.k1 must be >= 0");
  require(c.bm25.b >= 0.0 && c.bm25.b <= 1.0, "bm25.b must be in [0, 1]");
  require(c.rrf_k >= 0.0 && std::isfinite(c.rrf_k), "fusion.rrf_k must be >= 0");
  require(c.lexical_depth >= 1 && c.deep_depth >= 1, "fusion depths must be >= 1");
  require(c.eval_depth >= 1, "eval.depth must be >= 1");
  require(c.embedding.provider == "builtin" || c.embedding.provider == "remote",
          "embedding.provider must be 'builtin' or 'remote'");
  require(c.embedding.provider != "remote" || !c.embedding.endpoint.empty(),
          "embedding.endpoint is required for the remote provider");
  require(c.embedding.dimension >= 1, "embedding.dimension must be >= 1");
  require(c.embedding.batch_size >= 1, "embedding.batch_size must be >= 1");
  require(c.embedding.timeout_seconds >= 1, "embedding.timeout_seconds must be >= 1");
  require(c.loss.tau > 0.0 && std::isfinite(c.loss.tau), "loss.tau must be > 0");
  require(c.loss.alpha > 1.0 && std::isfinite(c.loss.alpha), "loss.alpha must be > 1");
  require(c.loss.beta > 1.0 && std::isfinite(c.loss.beta), "loss.beta must be > 1");
  require(!c.include_globs.empty(), "snapshot.include_globs must not be empty");
}

json to_json(const Config& c) {
  json kinds = json::object();
  for (const auto& [kind, cost] : c.chunking.kind_costs) kinds[std::string(to_string(kind))] = cost;
  return {
      {"chunking",
       {{"mode", to_string(c.chunking.mode)},
        {"window_size", c.chunking.window_size},
        {"tokens_per_line", c.chunking.tokens_per_line},
        {"stride", c.chunking.stride},
        {"default_cost", c.chunking.default_cost},
        {"kind_costs", kinds}}},
      {"bm25", {{"k1", c.bm25.k1}, {"b", c.bm25.b}}},
      {"fusion",
       {{"rrf_k", c.rrf_k}, {"lexical_depth", c.lexical_depth}, {"deep_depth", c.deep_depth}}},
      {"eval", {{"depth", c.eval_depth}}},
      {"embedding",
       {{"provider", c.embedding.provider},
        {"endpoint", c.embedding.endpoint},
        {"dimension", c.embedding.dimension},
        {"batch_size", c.embedding.batch_size},
        {"timeout_seconds", c.embedding.timeout_seconds}}},
      {"loss", {{"tau", c.loss.tau}, {"alpha", c.loss.alpha}, {"beta", c.loss.beta}}},
      {"snapshot", {{"include_globs", c.include_globs}}},
      {"seed", c.seed},
  };
}

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw usage_error("config: '" + where + "' must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw usage_error("config: unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw usage_error("config: '" + where + "." + key + "' has the wrong type");
  }
}

}  // namespace

Config config_from_json(const json& doc) {
  Config c;
  reject_unknown(doc, "", {"chunking", "bm25", "fusion", "eval", "embedding", "loss", "snapshot", "seed"});
  if (doc.contains("chunking")) {
    const json& j = doc["chunking"];
    reject_unknown(j, "chunking",
                   {"mode", "window_size", "tokens_per_line", "stride", "default_cost", "kind_costs"});
    if (j.contains("mode")) {
      std::string mode;
      read(j, "mode", mode, "chunking");
      c.chunking.mode = chunking_mode_from_string(mode);
    }
    read(j, "window_size", c.chunking.window_size, "chunking");
    read(j, "tokens_per_line", c.chunking.tokens_per_line, "chunking");
    read(j, "stride", c.chunking.stride, "chunking");
    read(j, "default_cost", c.chunking.default_cost, "chunking");
    if (j.contains("kind_costs")) {
      const json& kc = j["kind_costs"];
      if (!kc.is_object()) throw usage_error("config: 'chunking.kind_costs' must be an object");
      c.chunking.kind_costs.clear();
      for (const auto& [kind, cost] : kc.items()) {
        ComponentKind parsed;
        try {
          parsed = component_kind_from_string(kind);
        } catch (const Error&) {
          throw usage_error("config: unknown key 'chunking.kind_costs." + kind + "'");
        }
        if (!cost.is_number()) throw usage_error("config: kind cost for '" + kind + "' must be a number");
        c.chunking.kind_costs[parsed] = cost.get<double>();
      }
    }
  }
  if (doc.contains("bm25")) {
    const json& j = doc["bm25"];
    reject_unknown(j, "bm25", {"k1", "b"});
    read(j, "k1", c.bm25.k1, "bm25");
    read(j, "b", c.bm25.b, "bm25");
  }
  if (doc.contains("fusion")) {
    const json& j = doc["fusion"];
    reject_unknown(j, "fusion", {"rrf_k", "lexical_depth", "deep_depth"});
    read(j, "rrf_k", c.rrf_k, "fusion");
    read(j, "lexical_depth", c.lexical_depth, "fusion");
    read(j, "deep_depth", c.deep_depth, "fusion");
  }
  if (doc.contains("eval")) {
    const json& j = doc["eval"];
    reject_unknown(j, "eval", {"depth"});
    read(j, "depth", c.eval_depth, "eval");
  }
  if (doc.contains("embedding")) {
    const json& j = doc["embedding"];
    reject_unknown(j, "embedding", {"provider", "endpoint", "dimension", "batch_size", "timeout_seconds"});
    read(j, "provider", c.embedding.provider, "embedding");
    read(j, "endpoint", c.embedding.endpoint, "embedding");
    read(j, "dimension", c.embedding.dimension, "embedding");
    read(j, "batch_size", c.embedding.batch_size, "embedding");
    read(j, "timeout_seconds", c.embedding.timeout_seconds, "embedding");
  }
  if (doc.contains("loss")) {
    const json& j = doc["loss"];
    reject_unknown(j, "loss", {"tau", "alpha", "beta"});
    read(j, "tau", c.loss.tau, "loss");
    read(j, "alpha", c.loss.alpha, "loss");
    read(j, "beta", c.loss.beta, "loss");
  }
  if (doc.contains("snapshot")) {
    const json& j = doc["snapshot"];
    reject_unknown(j, "snapshot", {"include_globs"});
    read(j, "include_globs", c.include_globs, "snapshot");
  }
  read(doc, "seed", c.seed, "");
  validate(c);
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw usage_error("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

std::string config_hash(const Config& config) {
  // nlohmann::json objects are key-sorted, so dump() is canonical.
  return to_hex(fnv1a64(to_json(config).dump()));
}

std::size_t window_from_tokens(std::size_t context_tokens, double tokens_per_line) {
  if (!(tokens_per_line > 0.0)) throw usage_error("tokens_per_line must be > 0");
  const auto lines = static_cast<std::size_t>(std::floor(static_cast<double>(context_tokens) / tokens_per_line));
  return std::max<std::size_t>(1, lines);
}

}  // namespace bugloc
