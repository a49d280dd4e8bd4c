#pragma once

// Source instrumentation: every annotation becomes one or more inserted
// assert statements. All edits are pure insertions, so deleting the injected
// ranges restores the original source byte-exactly.

#include <string>
#include <vector>

#include "annotary/annotations/annotation.hpp"
#include "annotary/annotations/ast.hpp"

namespace annotary::annotations {

struct InjectedRange {
  int64_t begin = 0;  // rewritten-source coordinates, half-open
  int64_t end = 0;
  int annotation_id = -1;  // -1 for scaffolding (proxy shells, temp vars)
  bool is_assert = false;  // the range is an assert owned by the annotation

  bool contains(int64_t pos) const { return pos >= begin && pos < end; }
  bool overlaps(int64_t a, int64_t b) const { return begin < b && a < end; }
};

struct RewriteResult {
  std::string rewritten_source;
  std::vector<InjectedRange> ranges;  // ascending, non-overlapping
  std::vector<std::string> warnings;
};

// Applies check/never/invariant rewriting; set_restricted annotations do not
// change the source. The AST must come from compiling `source` itself.
RewriteResult rewrite_source(const std::string& source,
                             const ParsedAnnotations& parsed,
                             const AstFile& ast);

// Deletes every injected range; inverse of rewrite_source.
std::string strip_injected(const RewriteResult& result);

}  // namespace annotary::annotations
