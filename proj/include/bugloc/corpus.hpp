#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace bugloc {

enum class BugStatus { kOpen, kClosed };

/// One issue record in the ingested dataset.
struct BugReport {
  std::string id;  // "<repo_name>#<issue_id>", unique within a corpus
  std::string issue_id;
  std::string repo_name;
  std::string repo_url;
  std::string title;
  std::string body;
  std::vector<std::string> fixed_files;
  std::string sha_before;
  std::string sha_after;
  std::optional<std::string> reported_at;
  std::optional<std::string> fixed_at;
  BugStatus status = BugStatus::kClosed;
  std::string issue_url;
  std::string pull_url;

  /// Query text: title, blank line, body.
  std::string query_text() const;
};

/// Parses and validates one dataset record. Throws Error(kData) naming the
/// offending field.
BugReport parse_bug_report(const nlohmann::json& record);
nlohmann::json to_json(const BugReport& report);

struct IngestDiagnostic {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct CorpusHandle {
  std::vector<BugReport> reports;
  std::filesystem::path root;
  std::map<std::string, std::size_t> language_counts;  // by fixed-file extension
  std::vector<IngestDiagnostic> diagnostics;

  const BugReport* find(const std::string& id) const;
};

/// Reads a JSON Lines dataset. Malformed records become line-numbered
/// diagnostics; an unreadable file, zero valid records or a duplicate id
/// throw.
CorpusHandle ingest_dataset(const std::filesystem::path& path);

/// Language tag from the file extension: java, python, cpp, go, javascript,
/// or "unknown".
std::string language_from_path(std::string_view path);

struct SnapshotFiles {
  std::string version_id;
  std::map<std::string, std::string> files;        // repo-relative path -> text
  std::map<std::string, std::string> language_of;  // repo-relative path -> tag
  std::vector<std::string> warnings;
};

std::vector<std::string> default_source_globs();

/// Collects files under `repo_root` matching any of `include_globs`. Symlinks
/// are not followed and no returned path escapes the root.
SnapshotFiles load_snapshot(const std::filesystem::path& repo_root,
                            const std::string& version_id,
                            const std::vector<std::string>& include_globs);

struct ValidationReport {
  std::string report_id;
  std::vector<std::string> present;
  std::vector<std::string> missing;
  bool usable() const noexcept { return !present.empty(); }
};

ValidationReport validate_ground_truth(const BugReport& bug, const SnapshotFiles& snapshot);

}  // namespace bugloc
