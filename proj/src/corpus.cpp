#include "bugloc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "bugloc/error.hpp"
#include "bugloc/text.hpp"

namespace bugloc {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string require_string(const json& rec, const char* key, bool allow_empty = false) {
  if (!rec.contains(key)) throw data_error(std::string("missing required field '") + key + "'");
  const json& v = rec.at(key);
  std::string out;
  if (v.is_string()) {
    out = v.get<std::string>();
  } else if (v.is_number_integer()) {
    out = std::to_string(v.get<long long>());
  } else {
    throw data_error(std::string("field '") + key + "' must be a string");
  }
  if (!allow_empty && out.empty()) throw data_error(std::string("field '") + key + "' is empty");
  return out;
}

std::string optional_string(const json& rec, const char* key) {
  if (!rec.contains(key) || rec.at(key).is_null()) return {};
  if (!rec.at(key).is_string()) throw data_error(std::string("field '") + key + "' must be a string");
  return rec.at(key).get<std::string>();
}

bool is_hex(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isxdigit(c); });
}

// Seconds since the epoch for "YYYY-MM-DD", "YYYY-MM-DD[T ]HH:MM:SS[.fff][Z|±HH:MM]".
std::optional<long long> parse_timestamp(const std::string& s) {
  static const std::regex kPattern(
      R"(^(\d{4})-(\d{2})-(\d{2})(?:[T ](\d{2}):(\d{2}):(\d{2})(?:\.\d+)?(Z|[+-]\d{2}:?\d{2})?)?$)");
  std::smatch m;
  if (!std::regex_match(s, m, kPattern)) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{std::stoi(m[1])}, month{static_cast<unsigned>(std::stoi(m[2]))},
                           day{static_cast<unsigned>(std::stoi(m[3]))}};
  if (!ymd.ok()) return std::nullopt;
  long long secs = sys_days{ymd}.time_since_epoch() / seconds{1};
  if (m[4].matched) {
    const int hh = std::stoi(m[4]), mm = std::stoi(m[5]), ss = std::stoi(m[6]);
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    secs += hh * 3600LL + mm * 60LL + ss;
  }
  if (m[7].matched && m[7].str() != "Z") {
    std::string off = m[7].str();
    off.erase(std::remove(off.begin(), off.end(), ':'), off.end());
    const int sign = off[0] == '-' ? -1 : 1;
    const int oh = std::stoi(off.substr(1, 2)), om = std::stoi(off.substr(3, 2));
    secs -= sign * (oh * 3600LL + om * 60LL);
  }
  return secs;
}

std::string normalize_repo_path(std::string path) {
  std::replace(path.begin(), path.end(), '\\', '/');
  while (path.starts_with("./")) path.erase(0, 2);
  return path;
}

}  // namespace

std::string BugReport::query_text() const {
  if (title.empty()) return body;
  if (body.empty()) return title;
  return title + "\n\n" + body;
}

BugReport parse_bug_report(const json& rec) {
  if (!rec.is_object()) throw data_error("record is not a JSON object");
  BugReport r;
  r.issue_id = require_string(rec, "issue_id");
  r.repo_name = require_string(rec, "repo_name");
  r.id = r.repo_name + "#" + r.issue_id;
  r.title = require_string(rec, "title", true);
  r.body = require_string(rec, "body", true);
  if (!rec.contains("fixed_files")) throw data_error("missing required field 'fixed_files'");
  const json& files = rec.at("fixed_files");
  if (!files.is_array()) throw data_error("field 'fixed_files' must be an array");
  for (const auto& f : files) {
    if (!f.is_string() || f.get<std::string>().empty())
      throw data_error("field 'fixed_files' must hold non-empty strings");
    r.fixed_files.push_back(normalize_repo_path(f.get<std::string>()));
  }
  if (r.fixed_files.empty()) throw data_error("field 'fixed_files' is empty");
  r.sha_before = require_string(rec, "sha_before");
  r.sha_after = require_string(rec, "sha_after");
  if (!is_hex(r.sha_before)) throw data_error("field 'sha_before' is not a hex string");
  if (!is_hex(r.sha_after)) throw data_error("field 'sha_after' is not a hex string");
  if (r.sha_before == r.sha_after) throw data_error("sha_before equals sha_after");

  const std::string reported = optional_string(rec, "reported_at");
  const std::string fixed = optional_string(rec, "fixed_at");
  std::optional<long long> t_rep, t_fix;
  if (!reported.empty()) {
    t_rep = parse_timestamp(reported);
    if (!t_rep) throw data_error("field 'reported_at' is not an ISO-8601 timestamp");
    r.reported_at = reported;
  }
  if (!fixed.empty()) {
    t_fix = parse_timestamp(fixed);
    if (!t_fix) throw data_error("field 'fixed_at' is not an ISO-8601 timestamp");
    r.fixed_at = fixed;
  }
  if (t_rep && t_fix && *t_rep > *t_fix) throw data_error("reported_at is after fixed_at");

  const std::string status = optional_string(rec, "status");
  if (status.empty() || status == "closed") {
    r.status = BugStatus::kClosed;
  } else if (status == "open") {
    r.status = BugStatus::kOpen;
  } else {
    throw data_error("field 'status' must be 'open' or 'closed'");
  }
  r.repo_url = optional_string(rec, "repo_url");
  r.issue_url = optional_string(rec, "issue_url");
  r.pull_url = optional_string(rec, "pull_url");
  return r;
}

json to_json(const BugReport& r) {
  json j = {{"issue_id", r.issue_id},     {"repo_name", r.repo_name},
            {"repo_url", r.repo_url},     {"title", r.title},
            {"body", r.body},             {"fixed_files", r.fixed_files},
            {"sha_before", r.sha_before}, {"sha_after", r.sha_after},
            {"status", r.status == BugStatus::kOpen ? "open" : "closed"},
            {"issue_url", r.issue_url},   {"pull_url", r.pull_url}};
  if (r.reported_at) j["reported_at"] = *r.reported_at;
  if (r.fixed_at) j["fixed_at"] = *r.fixed_at;
  return j;
}

const BugReport* CorpusHandle::find(const std::string& id) const {
  for (const auto& r : reports) {
    if (r.id == id || r.issue_id == id) return &r;
  }
  return nullptr;
}

CorpusHandle ingest_dataset(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot read dataset " + path.string());

  CorpusHandle handle;
  handle.root = path.parent_path();
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    BugReport report;
    try {
      report = parse_bug_report(json::parse(decode_lossy_utf8(line)));
    } catch (const json::exception& e) {
      handle.diagnostics.push_back({lineno, std::string("invalid JSON: ") + e.what()});
      continue;
    } catch (const Error& e) {
      handle.diagnostics.push_back({lineno, e.what()});
      continue;
    }
    if (!ids.insert(report.id).second) {
      throw data_error(path.string() + ":" + std::to_string(lineno) + ": duplicate report id '" +
                       report.id + "'");
    }
    handle.language_counts[language_from_path(report.fixed_files.front())]++;
    handle.reports.push_back(std::move(report));
  }
  if (handle.reports.empty()) {
    std::string msg = "no valid records in " + path.string();
    if (!handle.diagnostics.empty()) {
      msg += " (line " + std::to_string(handle.diagnostics.front().line) + ": " +
             handle.diagnostics.front().message + ")";
    }
    throw data_error(msg);
  }
  return handle;
}

std::string language_from_path(std::string_view path) {
  const std::size_t dot = path.rfind('.');
  const std::size_t slash = path.rfind('/');
  if (dot == std::string_view::npos || (slash != std::string_view::npos && dot < slash)) {
    return "unknown";
  }
  std::string ext(path.substr(dot + 1));
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == "java") return "java";
  if (ext == "py") return "python";
  if (ext == "cc" || ext == "cpp" || ext == "cxx" || ext == "h" || ext == "hpp" || ext == "hh")
    return "cpp";
  if (ext == "go") return "go";
  if (ext == "js" || ext == "ts" || ext == "jsx" || ext == "tsx" || ext == "mjs") return "javascript";
  return "unknown";
}

std::vector<std::string> default_source_globs() {
  return {"**/*.java", "**/*.py", "**/*.cc", "**/*.cpp", "**/*.cxx", "**/*.h", "**/*.hpp",
          "**/*.hh",   "**/*.go", "**/*.js", "**/*.ts",  "**/*.jsx", "**/*.tsx"};
}

SnapshotFiles load_snapshot(const fs::path& repo_root, const std::string& version_id,
                            const std::vector<std::string>& include_globs) {
  std::error_code ec;
  if (!fs::is_directory(repo_root, ec)) {
    throw data_error("snapshot root is not a directory: " + repo_root.string());
  }
  const fs::path root = fs::canonical(repo_root, ec);
  if (ec) throw data_error("cannot resolve snapshot root " + repo_root.string());

  SnapshotFiles snap;
  snap.version_id = version_id;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw data_error("cannot list " + root.string() + ": " + ec.message());
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) {
      snap.warnings.push_back("listing error: " + ec.message());
      ec.clear();
      continue;
    }
    const fs::directory_entry& entry = *it;
    if (entry.is_symlink(ec)) continue;
    if (!entry.is_regular_file(ec)) continue;
    const fs::path rel = entry.path().lexically_relative(root);
    const std::string rel_str = rel.generic_string();
    if (rel.empty() || rel_str.starts_with("..")) continue;
    const bool wanted = std::any_of(include_globs.begin(), include_globs.end(),
                                    [&](const std::string& g) { return glob_match(g, rel_str); });
    if (!wanted) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) {
      snap.warnings.push_back("unreadable: " + rel_str);
      continue;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    snap.files.emplace(rel_str, decode_lossy_utf8(buf.str()));
    snap.language_of.emplace(rel_str, language_from_path(rel_str));
  }
  if (snap.files.empty()) throw data_error("no files matched under " + repo_root.string());
  return snap;
}

ValidationReport validate_ground_truth(const BugReport& bug, const SnapshotFiles& snapshot) {
  ValidationReport report;
  report.report_id = bug.id;
  for (const auto& f : bug.fixed_files) {
    (snapshot.files.contains(f) ? report.present : report.missing).push_back(f);
  }
  return report;
}

}  // namespace bugloc
