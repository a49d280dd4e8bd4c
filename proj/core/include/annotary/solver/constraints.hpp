#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annotary/evm/term.hpp"

namespace annotary::solver {

using evm::BoolTerm;
using evm::Word;
using evm::u256;

enum class Provenance { ContractPath, InjectedAnnotation, Environment };

struct TaggedConstraint {
  BoolTerm term;
  Provenance tag = Provenance::ContractPath;
  uint64_t code_id = 0;  // code object whose instruction added the constraint
  uint32_t pc = 0;
};

// Ordered (append-only along a path) but order-insensitive for satisfiability.
class ConstraintSet {
 public:
  void add(BoolTerm t, Provenance tag = Provenance::ContractPath,
           uint64_t code_id = 0, uint32_t pc = 0) {
    items_.push_back({std::move(t), tag, code_id, pc});
  }
  const std::vector<TaggedConstraint>& items() const { return items_; }
  std::vector<TaggedConstraint>& items() { return items_; }
  size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  std::vector<BoolTerm> terms() const;
  std::vector<BoolTerm> terms_without(Provenance excluded) const;

  // False only when some constraint is literally the False term.
  bool syntactically_consistent() const;

 private:
  std::vector<TaggedConstraint> items_;
};

struct Model {
  std::map<std::string, u256> assignments;
  std::optional<u256> lookup(const std::string& name) const {
    auto it = assignments.find(name);
    if (it == assignments.end()) return std::nullopt;
    return it->second;
  }
};

enum class SatKind { Sat, Unsat, Unknown };

struct CheckResult {
  SatKind kind = SatKind::Unknown;
  std::optional<Model> model;  // present for Sat
  bool is_sat() const { return kind == SatKind::Sat; }
  bool is_unsat() const { return kind == SatKind::Unsat; }
};

}  // namespace annotary::solver
