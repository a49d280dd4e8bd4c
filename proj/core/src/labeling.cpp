#include "annotary/annotations/labeling.hpp"

#include <map>

namespace annotary::annotations {

using symexec::GlobalState;
using symexec::StateLabel;
using symexec::TerminalKind;

LabelStats label_states(symexec::StateSpace& space, uint64_t code_id,
                        const std::vector<evm::Instruction>& instructions,
                        const std::vector<SrcEntry>& srcmap,
                        const std::vector<InjectedRange>& ranges,
                        int64_t source_index) {
  std::map<uint32_t, size_t> index_of_offset;
  for (size_t i = 0; i < instructions.size(); ++i)
    index_of_offset[instructions[i].offset] = i;

  // Annotation id of the injected assert range an instruction maps into, or
  // -1 when the instruction belongs to the original program. `contained`
  // demands the instruction's whole span inside the range: enclosing spans
  // (a dispatcher entry covering the full function) must not match when
  // deciding which constraints the instrumentation added.
  auto annotation_at = [&](uint32_t pc, bool contained) -> int {
    auto idx = index_of_offset.find(pc);
    // instructions past the srcmap (the metadata tail) have no entry and
    // stay unattributed
    if (idx == index_of_offset.end() || idx->second >= srcmap.size())
      return -1;
    const SrcEntry& e = srcmap[idx->second];
    if (e.f != source_index || e.s < 0 || e.l < 0) return -1;
    for (const InjectedRange& r : ranges) {
      if (!r.is_assert) continue;
      bool hit = contained ? (r.begin <= e.s && e.s + e.l <= r.end)
                           : r.overlaps(e.s, e.s + e.l);
      if (hit) return r.annotation_id;
    }
    return -1;
  };

  LabelStats stats;
  for (auto& sp : space.terminals) {
    GlobalState& s = *sp;

    // Path constraints contributed by injected assert code are not part of
    // the original program; mark them so later phases can set them apart.
    for (auto& item : s.constraints.items())
      if (item.code_id == code_id && annotation_at(item.pc, true) >= 0)
        item.tag = solver::Provenance::InjectedAnnotation;

    if (s.terminal != TerminalKind::Invalid) continue;
    if (s.has_label(StateLabel::Ignore)) {
      ++stats.ignored;
      continue;
    }

    int annotation = -1;
    if (s.invalid_code_id == code_id)
      annotation = annotation_at(s.invalid_pc, false);

    if (annotation >= 0) {
      s.labels.insert(StateLabel::Violating);
      s.violated_annotation = annotation;
      ++stats.violating;
    } else {
      s.labels.insert(StateLabel::Ignore);
      ++stats.ignored;
    }
  }
  return stats;
}

}  // namespace annotary::annotations
