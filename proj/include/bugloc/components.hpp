#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace bugloc {

enum class ComponentKind { kClass, kInterface, kMethod, kFunction, kBlock, kOther };

std::string_view to_string(ComponentKind kind);
ComponentKind component_kind_from_string(std::string_view name);  // throws on unknown

/// A named code component with an inclusive 1-based line range.
struct ComponentSpan {
  ComponentKind kind = ComponentKind::kOther;
  std::string name;
  std::size_t start_line = 1;
  std::size_t end_line = 1;

  friend bool operator==(const ComponentSpan&, const ComponentSpan&) = default;
};

struct ExtractionResult {
  std::vector<ComponentSpan> spans;
  bool unsupported_language = false;
};

enum class LanguageFamily { kBrace, kIndent, kUnsupported };

LanguageFamily language_family(std::string_view language);

/// Structural scan for classes, interfaces, methods and functions.
///
/// Brace-family languages (java, cpp, go, javascript) close a span at the
/// line holding the delimiter that matches the header's opening brace; string
/// literals and comments are skipped. Python spans close at the last
/// non-blank line indented deeper than the header. Spans still open at end of
/// input close on the last line. Output is ordered by start line (then by
/// descending end line so enclosing spans come first).
ExtractionResult extract_components(std::string_view source, std::string_view language);

/// Reads a JSON array of {kind, name, start_line, end_line}. Spans must be
/// 1-based with end_line >= start_line; overlap and nesting are allowed.
std::vector<ComponentSpan> load_external_spans(const std::filesystem::path& path);
std::vector<ComponentSpan> parse_external_spans(const nlohmann::json& doc);

nlohmann::json to_json(const ComponentSpan& span);

}  // namespace bugloc
