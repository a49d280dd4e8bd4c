#include "annotary/solver/constraints.hpp"

namespace annotary::solver {

std::vector<BoolTerm> ConstraintSet::terms() const {
  std::vector<BoolTerm> out;
  out.reserve(items_.size());
  for (const auto& it : items_) out.push_back(it.term);
  return out;
}

std::vector<BoolTerm> ConstraintSet::terms_without(Provenance excluded) const {
  std::vector<BoolTerm> out;
  for (const auto& it : items_)
    if (it.tag != excluded) out.push_back(it.term);
  return out;
}

bool ConstraintSet::syntactically_consistent() const {
  for (const auto& it : items_)
    if (it.term->is_false()) return false;
  return true;
}

}  // namespace annotary::solver
