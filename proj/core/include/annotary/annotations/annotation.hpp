#pragma once

#include <optional>
#include <string>
#include <vector>

namespace annotary::annotations {

enum class AnnotationKind { Check, Never, Invariant, SetRestricted };

enum class AllowedKind { Constructor, FunctionName, FunctionSignature };

struct AllowedWriter {
  AllowedKind kind = AllowedKind::FunctionName;
  std::string text;  // name or full signature; empty for Constructor
};

struct RestrictedMember {
  std::optional<std::string> contract;  // qualified "Contract.member" form
  std::string member;
};

struct Annotation {
  AnnotationKind kind = AnnotationKind::Check;
  std::string expr_text;                  // Check/Never/Invariant
  std::vector<RestrictedMember> members;  // SetRestricted
  std::vector<AllowedWriter> allowed;     // SetRestricted
  std::string file;
  int line = 0;                  // 1-based
  int64_t byte_offset = 0;       // position of '@'
  int64_t comment_end = 0;       // one past the annotation's closing paren
  int id = 0;                    // stable per file, declaration order
};

struct AnnotationDiagnostic {
  std::string message;
  int line = 0;
  int column = 0;
};

struct ParsedAnnotations {
  std::vector<Annotation> annotations;
  std::vector<AnnotationDiagnostic> diagnostics;
};

// Scans comments for @check/@never/@invariant/@set_restricted. Malformed
// annotations produce diagnostics; parsing continues.
ParsedAnnotations parse_annotations(const std::string& source,
                                    const std::string& file = {});

}  // namespace annotary::annotations
