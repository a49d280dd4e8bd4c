#pragma once

// Classifies terminal states of an exploration: an INVALID halt whose source
// mapping lands inside an injected assert is a potential annotation violation;
// every other INVALID halt (compiler-emitted asserts, unreachable markers,
// exceeded bounds) is out of scope and labeled Ignore.

#include <vector>

#include "annotary/annotations/compile.hpp"
#include "annotary/annotations/rewrite.hpp"
#include "annotary/evm/instruction.hpp"
#include "annotary/symexec/explorer.hpp"

namespace annotary::annotations {

struct LabelStats {
  size_t violating = 0;
  size_t ignored = 0;
};

// `instructions` and `srcmap` describe the code registered under `code_id`
// (runtime or creation, matching how the exploration was run); `source_index`
// is the rewritten file's position in the compiler's source list.
LabelStats label_states(symexec::StateSpace& space, uint64_t code_id,
                        const std::vector<evm::Instruction>& instructions,
                        const std::vector<SrcEntry>& srcmap,
                        const std::vector<InjectedRange>& ranges,
                        int64_t source_index);

}  // namespace annotary::annotations
