#include "bugloc/components.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>

#include "bugloc/error.hpp"

namespace bugloc {
using nlohmann::json;

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::kClass: return "class";
    case ComponentKind::kInterface: return "interface";
    case ComponentKind::kMethod: return "method";
    case ComponentKind::kFunction: return "function";
    case ComponentKind::kBlock: return "block";
    case ComponentKind::kOther: return "other";
  }
  return "other";
}

ComponentKind component_kind_from_string(std::string_view name) {
  if (name == "class") return ComponentKind::kClass;
  if (name == "interface") return ComponentKind::kInterface;
  if (name == "method") return ComponentKind::kMethod;
  if (name == "function") return ComponentKind::kFunction;
  if (name == "block") return ComponentKind::kBlock;
  if (name == "other") return ComponentKind::kOther;
  throw data_error("unknown component kind '" + std::string(name) + "'");
}

LanguageFamily language_family(std::string_view language) {
  if (language == "java" || language == "cpp" || language == "go" || language == "javascript")
    return LanguageFamily::kBrace;
  if (language == "python") return LanguageFamily::kIndent;
  return LanguageFamily::kUnsupported;
}

namespace {

// Copy of `src` with comment text and string-literal contents blanked out.
// Newlines and literal delimiters survive so line numbers and "non-blank"
// tests still work on the result.
std::string strip_literals(std::string_view src, LanguageFamily family, std::string_view language) {
  std::string out(src);
  const std::size_t n = src.size();
  const auto blank = [&](std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to && k < n; ++k) {
      if (out[k] != '\n') out[k] = ' ';
    }
  };
  const bool backtick = language == "javascript" || language == "go";
  std::size_t i = 0;
  while (i < n) {
    const char c = src[i];
    if (family == LanguageFamily::kBrace && c == '/' && i + 1 < n && src[i + 1] == '/') {
      const std::size_t end = std::min(src.find('\n', i), n);
      blank(i, end);
      i = end;
    } else if (family == LanguageFamily::kBrace && c == '/' && i + 1 < n && src[i + 1] == '*') {
      const std::size_t close = src.find("*/", i + 2);
      const std::size_t end = close == std::string_view::npos ? n : close + 2;
      blank(i, end);
      i = end;
    } else if (family == LanguageFamily::kIndent && c == '#') {
      const std::size_t end = std::min(src.find('\n', i), n);
      blank(i, end);
      i = end;
    } else if (family == LanguageFamily::kIndent && (c == '"' || c == '\'') && i + 2 < n &&
               src[i + 1] == c && src[i + 2] == c) {
      const std::string delim(3, c);
      const std::size_t close = src.find(delim, i + 3);
      const std::size_t end = close == std::string_view::npos ? n : close;
      blank(i + 3, end);
      i = end == n ? n : end + 3;
    } else if (c == '"' || c == '\'' || (backtick && c == '`')) {
      // Go runes and Java/C++ chars use the same scan as strings; a stray
      // apostrophe stops at the end of its line.
      std::size_t k = i + 1;
      while (k < n && src[k] != c) {
        if (src[k] == '\\' && c != '`') {
          ++k;
        } else if (src[k] == '\n' && c != '`') {
          break;
        }
        ++k;
      }
      const std::size_t end = std::min(k, n);
      blank(i + 1, end);
      i = end < n && src[end] == c ? end + 1 : end;
    } else {
      ++i;
    }
  }
  return out;
}

struct LineTable {
  std::vector<std::size_t> starts;  // offset of each line's first byte
  std::size_t total_bytes = 0;

  explicit LineTable(std::string_view text) : total_bytes(text.size()) {
    if (!text.empty()) starts.push_back(0);
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '\n' && i + 1 < text.size()) starts.push_back(i + 1);
    }
  }
  std::size_t count() const { return starts.size(); }
  // 1-based line of byte offset.
  std::size_t line_of(std::size_t offset) const {
    return static_cast<std::size_t>(std::upper_bound(starts.begin(), starts.end(), offset) -
                                    starts.begin());
  }
  std::string_view line(std::string_view text, std::size_t lineno) const {
    const std::size_t b = starts[lineno - 1];
    const std::size_t e = lineno < starts.size() ? starts[lineno] : total_bytes;
    std::string_view l = text.substr(b, e - b);
    if (!l.empty() && l.back() == '\n') l.remove_suffix(1);
    return l;
  }
};

bool is_control_keyword(const std::string& w) {
  static const std::set<std::string> kWords = {
      "if",     "for",    "while",  "switch", "catch",  "return", "new",      "else",
      "throw",  "case",   "do",     "try",    "sizeof", "delete", "typeof",   "await",
      "yield",  "synchronized", "using", "goto", "assert", "static_assert", "decltype",
      "alignof", "defined", "function", "import", "super", "this", "with", "in", "of",
      "instanceof", "co_return", "co_await", "operator", "requires", "elif"};
  return kWords.contains(w);
}

struct Header {
  ComponentKind kind;
  std::string name;
  std::size_t offset;  // where to start looking for the opening brace
};

std::vector<Header> brace_headers(std::string_view line, std::size_t line_offset,
                                  std::string_view language) {
  std::vector<Header> out;
  const std::string l(line);
  std::smatch m;
  const auto at = [&](const std::smatch& mm, int group) {
    return line_offset + static_cast<std::size_t>(mm.position(group) + mm.length(group));
  };

  if (language == "go") {
    static const std::regex kType(R"(^\s*type\s+([A-Za-z_]\w*)(?:\[[^\]]*\])?\s+(struct|interface)\b)");
    static const std::regex kFunc(R"(^\s*func\s*(\([^)]*\))?\s*([A-Za-z_]\w*)\s*[\[(])");
    if (std::regex_search(l, m, kType)) {
      out.push_back({m[2] == "struct" ? ComponentKind::kClass : ComponentKind::kInterface, m[1],
                     at(m, 2)});
    } else if (std::regex_search(l, m, kFunc)) {
      out.push_back({m[1].matched ? ComponentKind::kMethod : ComponentKind::kFunction, m[2],
                     at(m, 2)});
    }
    return out;
  }

  static const std::regex kInterface(R"((?:^|[^\w@])(?:@)?interface\s+([A-Za-z_$][\w$]*))");
  static const std::regex kEnum(R"((?:^|\W)enum(?:\s+(?:class|struct))?\s+([A-Za-z_$][\w$]*))");
  static const std::regex kClass(R"((?:^|[^\w.])(class|struct)\s+(?:[A-Z_]+\s+)?([A-Za-z_$][\w$]*))");
  bool type_header = false;
  if (std::regex_search(l, m, kEnum)) {
    out.push_back({ComponentKind::kOther, m[1], at(m, 1)});
    type_header = true;
  } else if (std::regex_search(l, m, kInterface)) {
    out.push_back({ComponentKind::kInterface, m[1], at(m, 1)});
    type_header = true;
  } else if (std::regex_search(l, m, kClass)) {
    out.push_back({ComponentKind::kClass, m[2], at(m, 2)});
    type_header = true;
  }
  if (type_header) return out;

  if (language == "javascript") {
    static const std::regex kFunction(R"((?:^|\W)function\s*\*?\s*([A-Za-z_$][\w$]*)\s*\()");
    static const std::regex kAssigned(
        R"(^\s*(?:export\s+)?(?:const|let|var)\s+([A-Za-z_$][\w$]*)\s*=\s*(?:async\s+)?(?:function\b[^(]*\(|\([^)]*\)\s*=>|[A-Za-z_$][\w$]*\s*=>))");
    static const std::regex kMethod(
        R"(^\s*(?:(?:static|async|get|set|public|private|protected|readonly)\s+)*\*?\s*([A-Za-z_$][\w$]*)\s*\([^;]*$)");
    if (std::regex_search(l, m, kFunction)) {
      out.push_back({ComponentKind::kFunction, m[1], at(m, 1)});
    } else if (std::regex_search(l, m, kAssigned)) {
      out.push_back({ComponentKind::kFunction, m[1], at(m, 1)});
    } else if (std::regex_search(l, m, kMethod) && !is_control_keyword(m[1])) {
      out.push_back({ComponentKind::kMethod, m[1], at(m, 1)});
    }
    return out;
  }

  // java / cpp
  static const std::regex kTyped(
      R"(^\s*(?:template\s*<[^>]*>\s*)?((?:[\w$]+(?:<[^;{}()]*>)?(?:\[\])*[\s*&]+)+)((?:[A-Za-z_$][\w$]*::)*~?[A-Za-z_$][\w$]*|operator\s*\S+?)\s*\()");
  static const std::regex kQualified(R"(^\s*((?:[A-Za-z_]\w*::)+~?[A-Za-z_]\w*)\s*\()");
  static const std::regex kBare(R"(^\s*(~?[A-Za-z_$][\w$]*)\s*\([^;]*$)");
  if (std::regex_search(l, m, kTyped)) {
    std::string type_words = m[1];
    std::string first_word;
    for (char c : type_words) {
      if (std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '&' || c == '<') break;
      first_word += c;
    }
    const std::string name = m[2];
    if (!is_control_keyword(first_word) && !is_control_keyword(name) && first_word != "class") {
      const bool qualified = name.find("::") != std::string::npos;
      if (language == "java" || qualified) {
        out.push_back({ComponentKind::kMethod, name, at(m, 2)});
      } else {
        out.push_back({ComponentKind::kFunction, name, at(m, 2)});
      }
    }
  } else if (language == "cpp" && std::regex_search(l, m, kQualified)) {
    out.push_back({ComponentKind::kMethod, m[1], at(m, 1)});
  } else if (std::regex_search(l, m, kBare) && !is_control_keyword(m[1])) {
    // Constructor without modifiers; only kept when it names its class.
    out.push_back({ComponentKind::kMethod, m[1], at(m, 1)});
  }
  return out;
}

ExtractionResult extract_brace(std::string_view source, std::string_view language) {
  const std::string clean = strip_literals(source, LanguageFamily::kBrace, language);
  const LineTable lines(clean);
  const std::size_t total = lines.count();

  // Matching close for every '{' (npos when unbalanced).
  std::vector<std::size_t> close_of(clean.size(), std::string::npos);
  {
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      if (clean[i] == '{') {
        stack.push_back(i);
      } else if (clean[i] == '}' && !stack.empty()) {
        close_of[stack.back()] = i;
        stack.pop_back();
      }
    }
  }

  ExtractionResult result;
  for (std::size_t ln = 1; ln <= total; ++ln) {
    const std::string_view text = lines.line(clean, ln);
    for (Header& h : brace_headers(text, lines.starts[ln - 1], language)) {
      // The body opens at the first '{' before any ';'. A ')' that closes a
      // call followed by ';' marks a statement, not a definition.
      std::size_t open = std::string::npos;
      for (std::size_t k = h.offset; k < clean.size(); ++k) {
        if (clean[k] == '{') {
          open = k;
          break;
        }
        if (clean[k] == ';' || clean[k] == '}') break;
        if (clean[k] == '=' && h.kind != ComponentKind::kFunction && k + 1 < clean.size() &&
            clean[k + 1] != '>' && clean[k + 1] != '=' && (k == 0 || clean[k - 1] != '=')) {
          break;  // initializer, e.g. `Foo x = new Foo() {`
        }
      }
      if (open == std::string::npos) continue;
      const std::size_t close = close_of[open];
      const std::size_t end_line = close == std::string::npos ? total : lines.line_of(close);
      result.spans.push_back({h.kind, h.name, ln, std::max(end_line, ln)});
    }
  }

  // Containment pass: cpp functions nested in classes become methods; bare
  // java/cpp "constructors" survive only inside a class of the same name; js
  // shorthand methods survive only inside a class.
  std::vector<ComponentSpan> kept;
  const auto enclosing_class = [&](const ComponentSpan& s) -> const ComponentSpan* {
    const ComponentSpan* best = nullptr;
    for (const auto& c : result.spans) {
      if (&c == &s) continue;
      if ((c.kind == ComponentKind::kClass || c.kind == ComponentKind::kInterface ||
           c.kind == ComponentKind::kOther) &&
          c.start_line <= s.start_line && c.end_line >= s.end_line &&
          !(c.start_line == s.start_line && c.end_line == s.end_line)) {
        if (!best || c.start_line >= best->start_line) best = &c;
      }
    }
    return best;
  };
  static const std::regex kBareName(R"(^~?[A-Za-z_$][\w$]*$)");
  for (const auto& s : result.spans) {
    const ComponentSpan* owner = enclosing_class(s);
    ComponentSpan out = s;
    if (language == "cpp" && s.kind == ComponentKind::kFunction && owner) {
      out.kind = ComponentKind::kMethod;
    }
    if ((language == "java" || language == "cpp") && s.kind == ComponentKind::kMethod &&
        std::regex_match(s.name, kBareName)) {
      // Either a typed method (java) or a bare constructor candidate; the
      // latter carries no return type and must match its class.
      const std::string_view header = lines.line(clean, s.start_line);
      static const std::regex kBareLine(R"(^\s*~?[A-Za-z_$][\w$]*\s*\()");
      if (std::regex_search(std::string(header), kBareLine)) {
        std::string bare = s.name;
        if (!bare.empty() && bare[0] == '~') bare.erase(0, 1);
        if (!owner || owner->name != bare) continue;
      }
    }
    if (language == "javascript" && s.kind == ComponentKind::kMethod && !owner) continue;
    kept.push_back(std::move(out));
  }
  result.spans = std::move(kept);
  return result;
}

std::size_t indent_width(std::string_view line) {
  std::size_t w = 0;
  for (char c : line) {
    if (c == ' ') {
      ++w;
    } else if (c == '\t') {
      w = (w / 8 + 1) * 8;
    } else {
      break;
    }
  }
  return w;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\f\v") == std::string_view::npos;
}

ExtractionResult extract_indent(std::string_view source) {
  const std::string clean = strip_literals(source, LanguageFamily::kIndent, "python");
  const LineTable lines(clean);
  const std::size_t total = lines.count();

  // A line is a continuation when it starts inside open brackets.
  std::vector<bool> continuation(total + 2, false);
  {
    int depth = 0;
    std::size_t ln = 1;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      const char c = clean[i];
      if (c == '(' || c == '[' || c == '{') ++depth;
      if ((c == ')' || c == ']' || c == '}') && depth > 0) --depth;
      if (c == '\n') {
        ++ln;
        if (ln <= total) continuation[ln] = depth > 0;
      }
    }
  }

  static const std::regex kHeader(R"(^([ \t]*)(?:async\s+)?(def|class)\s+([A-Za-z_]\w*))");
  ExtractionResult result;
  std::vector<std::pair<std::size_t, std::size_t>> class_ranges;
  for (std::size_t ln = 1; ln <= total; ++ln) {
    if (continuation[ln]) continue;
    const std::string line(lines.line(clean, ln));
    std::smatch m;
    if (!std::regex_search(line, m, kHeader)) continue;
    const std::size_t indent = indent_width(line);
    std::size_t end = ln;
    // Header may continue across bracketed lines.
    while (end + 1 <= total && continuation[end + 1]) ++end;
    for (std::size_t k = end + 1; k <= total; ++k) {
      const std::string_view body = lines.line(clean, k);
      if (is_blank(body)) continue;
      if (!continuation[k] && indent_width(body) <= indent) break;
      end = k;
    }
    const bool is_class = m[2] == "class";
    result.spans.push_back(
        {is_class ? ComponentKind::kClass : ComponentKind::kFunction, m[3], ln, end});
  }
  for (auto& s : result.spans) {
    if (s.kind != ComponentKind::kFunction) continue;
    for (const auto& c : result.spans) {
      if (c.kind == ComponentKind::kClass && c.start_line < s.start_line && c.end_line >= s.end_line) {
        // Only the innermost enclosing definition decides.
        bool nested_in_def = false;
        for (const auto& d : result.spans) {
          if (d.kind == ComponentKind::kFunction && &d != &s && d.start_line > c.start_line &&
              d.start_line < s.start_line && d.end_line >= s.end_line) {
            nested_in_def = true;
          }
        }
        if (!nested_in_def) s.kind = ComponentKind::kMethod;
      }
    }
  }
  return result;
}

}  // namespace

ExtractionResult extract_components(std::string_view source, std::string_view language) {
  ExtractionResult result;
  switch (language_family(language)) {
    case LanguageFamily::kBrace: result = extract_brace(source, language); break;
    case LanguageFamily::kIndent: result = extract_indent(source); break;
    case LanguageFamily::kUnsupported: result.unsupported_language = true; return result;
  }
  std::stable_sort(result.spans.begin(), result.spans.end(),
                   [](const ComponentSpan& a, const ComponentSpan& b) {
                     if (a.start_line != b.start_line) return a.start_line < b.start_line;
                     return a.end_line > b.end_line;
                   });
  return result;
}

std::vector<ComponentSpan> parse_external_spans(const json& doc) {
  if (!doc.is_array()) throw data_error("span file must hold a JSON array");
  std::vector<ComponentSpan> spans;
  std::size_t index = 0;
  for (const auto& rec : doc) {
    const std::string where = "span " + std::to_string(index++);
    if (!rec.is_object()) throw data_error(where + ": not an object");
    for (const char* key : {"kind", "name", "start_line", "end_line"}) {
      if (!rec.contains(key)) throw data_error(where + ": missing '" + key + "'");
    }
    if (!rec["start_line"].is_number_integer() || !rec["end_line"].is_number_integer())
      throw data_error(where + ": line numbers must be integers");
    const long long start = rec["start_line"].get<long long>();
    const long long end = rec["end_line"].get<long long>();
    if (start < 1) throw data_error(where + ": start_line must be >= 1");
    if (end < start) throw data_error(where + ": end_line < start_line");
    spans.push_back({component_kind_from_string(rec["kind"].get<std::string>()),
                     rec["name"].get<std::string>(), static_cast<std::size_t>(start),
                     static_cast<std::size_t>(end)});
  }
  std::stable_sort(spans.begin(), spans.end(), [](const ComponentSpan& a, const ComponentSpan& b) {
    return a.start_line < b.start_line;
  });
  return spans;
}

std::vector<ComponentSpan> load_external_spans(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot read span file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw data_error("span file " + path.string() + ": " + e.what());
  }
  return parse_external_spans(doc);
}

json to_json(const ComponentSpan& span) {
  return {{"kind", to_string(span.kind)},
          {"name", span.name},
          {"start_line", span.start_line},
          {"end_line", span.end_line}};
}

}  // namespace bugloc
