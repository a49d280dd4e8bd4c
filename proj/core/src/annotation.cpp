#include "annotary/annotations/annotation.hpp"

#include <cctype>

namespace annotary::annotations {

namespace {

struct Scanner {
  const std::string& src;
  size_t pos = 0;
  int line = 1;
  int64_t line_start = 0;

  bool done() const { return pos >= src.size(); }
  char at(size_t i) const { return i < src.size() ? src[i] : '\0'; }
  char cur() const { return at(pos); }

  void advance() {
    if (src[pos] == '\n') {
      ++line;
      line_start = static_cast<int64_t>(pos) + 1;
    }
    ++pos;
  }
  int column_of(size_t p) const {
    return static_cast<int>(static_cast<int64_t>(p) - line_start) + 1;
  }
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// Reads a balanced-paren argument starting at `open` (which must be '(').
// Returns one past the matching ')' and the inner text, or nullopt if the
// parens never balance before `limit`.
std::optional<std::pair<std::string, size_t>> balanced_argument(
    const std::string& src, size_t open, size_t limit) {
  if (open >= limit || src[open] != '(') return std::nullopt;
  int depth = 0;
  bool in_string = false;
  char quote = '\0';
  for (size_t i = open; i < limit; ++i) {
    char c = src[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == quote) in_string = false;
      continue;
    }
    if (c == '"' || c == '\'') {
      in_string = true;
      quote = c;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (--depth == 0)
        return std::make_pair(src.substr(open + 1, i - open - 1), i + 1);
    }
  }
  return std::nullopt;
}

bool parse_set_restricted_body(const std::string& body, Annotation& ann,
                               std::string& err) {
  for (const std::string& raw_clause : split(body, ';')) {
    std::string clause = trim(raw_clause);
    if (clause.empty()) continue;
    size_t eq = clause.find('=');
    if (eq == std::string::npos) {
      err = "clause \"" + clause + "\" has no '='";
      return false;
    }
    std::string key = trim(clause.substr(0, eq));
    std::string values = clause.substr(eq + 1);
    if (key == "var") {
      for (const std::string& raw : split(values, ',')) {
        std::string v = trim(raw);
        if (v.empty()) continue;
        RestrictedMember m;
        size_t dot = v.find('.');
        if (dot != std::string::npos) {
          m.contract = v.substr(0, dot);
          m.member = v.substr(dot + 1);
        } else {
          m.member = v;
        }
        ann.members.push_back(std::move(m));
      }
    } else if (key == "func") {
      // signatures contain commas inside their parens, so split manually
      size_t i = 0;
      while (i < values.size()) {
        size_t start = i;
        int depth = 0;
        while (i < values.size() && (depth > 0 || values[i] != ',')) {
          if (values[i] == '(') ++depth;
          else if (values[i] == ')') --depth;
          ++i;
        }
        std::string v = trim(values.substr(start, i - start));
        if (i < values.size()) ++i;  // skip the comma
        if (v.empty()) continue;
        AllowedWriter w;
        if (v == "constructor") {
          w.kind = AllowedKind::Constructor;
        } else if (v.find('(') != std::string::npos) {
          if (v.back() != ')') {
            err = "malformed signature \"" + v + "\"";
            return false;
          }
          w.kind = AllowedKind::FunctionSignature;
          w.text = v;
        } else {
          w.kind = AllowedKind::FunctionName;
          w.text = v;
        }
        ann.allowed.push_back(std::move(w));
      }
    } else {
      err = "unknown clause key \"" + key + "\"";
      return false;
    }
  }
  if (ann.members.empty()) {
    err = "no restricted members given (missing var= clause)";
    return false;
  }
  return true;
}

int column_at(const std::string& src, size_t pos) {
  size_t nl = src.rfind('\n', pos == 0 ? 0 : pos - 1);
  return static_cast<int>(pos - (nl == std::string::npos ? 0 : nl + 1)) + 1;
}

// Handles the comment text spanning [begin, end) in the original source.
void scan_comment(const Scanner& sc, size_t begin, size_t end,
                  ParsedAnnotations& out, const std::string& file,
                  int comment_line) {
  static const std::pair<const char*, AnnotationKind> kKeywords[] = {
      {"check", AnnotationKind::Check},
      {"never", AnnotationKind::Never},
      {"invariant", AnnotationKind::Invariant},
      {"set_restricted", AnnotationKind::SetRestricted},
  };
  const std::string& src = sc.src;
  size_t i = begin;
  int line = comment_line;
  while (i < end) {
    if (src[i] == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (src[i] != '@') {
      ++i;
      continue;
    }
    size_t at = i;
    size_t j = i + 1;
    while (j < end && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                       src[j] == '_'))
      ++j;
    std::string word = src.substr(i + 1, j - i - 1);
    i = j;
    AnnotationKind kind;
    bool known = false;
    for (const auto& [kw, k] : kKeywords) {
      if (word == kw) {
        kind = k;
        known = true;
        break;
      }
    }
    if (!known) continue;  // stray '@' in prose, not an annotation

    while (j < end && (src[j] == ' ' || src[j] == '\t')) ++j;
    auto arg = balanced_argument(src, j, end);
    if (!arg) {
      out.diagnostics.push_back(
          {"@" + word + " is missing a balanced parenthesized argument", line,
           column_at(src, at)});
      continue;
    }
    Annotation ann;
    ann.kind = kind;
    ann.file = file;
    ann.line = line;
    ann.byte_offset = static_cast<int64_t>(at);
    ann.comment_end = static_cast<int64_t>(arg->second);
    ann.id = static_cast<int>(out.annotations.size());
    std::string body = trim(arg->first);
    if (kind == AnnotationKind::SetRestricted) {
      std::string err;
      if (!parse_set_restricted_body(body, ann, err)) {
        out.diagnostics.push_back(
            {"@set_restricted: " + err, line, column_at(src, at)});
        i = arg->second;
        continue;
      }
    } else {
      if (body.empty()) {
        out.diagnostics.push_back(
            {"@" + word + " has an empty condition", line, column_at(src, at)});
        i = arg->second;
        continue;
      }
      ann.expr_text = body;
    }
    out.annotations.push_back(std::move(ann));
    i = arg->second;
  }
}

}  // namespace

ParsedAnnotations parse_annotations(const std::string& source,
                                    const std::string& file) {
  ParsedAnnotations out;
  Scanner sc{source};
  while (!sc.done()) {
    char c = sc.cur();
    if (c == '"' || c == '\'') {
      char quote = c;
      sc.advance();
      while (!sc.done() && sc.cur() != quote) {
        if (sc.cur() == '\\') sc.advance();
        if (!sc.done()) sc.advance();
      }
      if (!sc.done()) sc.advance();
    } else if (c == '/' && sc.at(sc.pos + 1) == '/') {
      size_t begin = sc.pos + 2;
      int line = sc.line;
      while (!sc.done() && sc.cur() != '\n') sc.advance();
      scan_comment(sc, begin, sc.pos, out, file, line);
    } else if (c == '/' && sc.at(sc.pos + 1) == '*') {
      size_t begin = sc.pos + 2;
      int line = sc.line;
      sc.advance();
      sc.advance();
      while (!sc.done() &&
             !(sc.cur() == '*' && sc.at(sc.pos + 1) == '/'))
        sc.advance();
      size_t end = sc.pos;
      if (!sc.done()) {
        sc.advance();
        sc.advance();
      }
      scan_comment(sc, begin, end, out, file, line);
    } else {
      sc.advance();
    }
  }
  return out;
}

}  // namespace annotary::annotations
