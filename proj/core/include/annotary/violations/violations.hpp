#pragma once

// Violation discovery and confidence classification: assert violations from
// the labeled state space, SSTORE write-restriction violations, and the
// backward trace-chaining search that decides how reachable each one is.

#include <optional>
#include <string>
#include <vector>

#include "annotary/annotations/annotation.hpp"
#include "annotary/annotations/layout.hpp"
#include "annotary/traces/trace.hpp"

namespace annotary::violations {

// Ordered most to least confident.
enum class ConfidenceLevel {
  SingleTransaction,   // violable from any state in one transaction
  ChainedTransaction,  // violable from any state via a transaction sequence
  Constructed,         // violable starting from a fresh deployment
  Unconfirmed,         // open chains remained at the depth budget
  AvoidingContext,     // every chain attempt became unsatisfiable
  Unsatisfiable,       // the violating path itself cannot be taken
};

const char* to_string(ConfidenceLevel level);

struct Violation {
  int annotation_id = -1;
  uint64_t code_id = 0;
  uint32_t pc = 0;
  std::string function;       // signature, "constructor", or "" for fallback
  std::string member;         // set_restricted: written member, if resolved
  std::string note;           // e.g. "unresolved storage index"
  traces::TransactionTrace trace;                // the violating trace
  std::vector<traces::TransactionTrace> chain;   // witness, head first
  ConfidenceLevel level = ConfidenceLevel::Unconfirmed;
  std::optional<solver::Model> model;
  bool persisted = true;
};

// One pre-classified Violation per violating trace; unsatisfiable ones are
// finished immediately, the rest await check_severity.
std::vector<Violation> find_assert_violations(
    const std::vector<traces::TransactionTrace>& traces,
    solver::Solver& solver);

// True iff some STOP/RETURN terminal completes the violating path in the
// un-instrumented program: its non-injected path constraints subsume the
// violation's, and adding the injected violated conditions stays satisfiable.
bool confirm_persistence(const symexec::StateSpace& space,
                         const Violation& v, solver::Solver& solver);

struct ResolvedMember {
  bool resolved = false;
  std::string member;
  annotations::SlotKind kind = annotations::SlotKind::Scalar;
};

// Concrete index: direct slot range lookup. Hash-derived index: the tracked
// keccak derivation is peeled (constant offsets, then the trailing Concat
// word) down to the base slot constant.
ResolvedMember resolve_storage_member(const evm::Word& index,
                                      const annotations::StorageLayout& layout,
                                      const symexec::KeccakMap& keccak_map);

// "constructor", the dispatched function's signature recovered from the
// selector equality in the path constraints, or "" for the default function.
std::string identify_function(
    const symexec::GlobalState& s,
    const std::map<uint32_t, std::string>& selector_to_signature);

// SSTORE events on persisting paths that write a protected member from a
// writer the annotation does not allow.
std::vector<Violation> find_set_restricted_violations(
    const symexec::StateSpace& space, const annotations::Annotation& ann,
    const annotations::StorageLayout& layout,
    const std::map<uint32_t, std::string>& selector_to_signature,
    solver::Solver& solver);

// Substitutes every storage-origin symbol with zero: pre-construction
// storage is empty.
traces::TransactionTrace zeroize_storage_vars(
    const traces::TransactionTrace& t);

struct SeverityResult {
  ConfidenceLevel level = ConfidenceLevel::AvoidingContext;
  std::vector<traces::TransactionTrace> chain;  // witness, head first; the
                                                // final element is the
                                                // combined violating trace
};

// Backward breadth-first chaining over the constructor/message traces, up to
// max_depth prepended transactions. pref_ind keeps searching for a
// state-independent witness after a constructed one exists.
SeverityResult check_severity(const traces::TransactionTrace& violating,
                              const std::vector<traces::TransactionTrace>& tc,
                              const std::vector<traces::TransactionTrace>& tm,
                              int max_depth, bool pref_ind,
                              solver::Solver& solver);

}  // namespace annotary::violations
