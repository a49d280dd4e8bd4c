#pragma once

// Transaction traces: the persisted effect of one transaction as a
// substitution map over state keys (delta) plus the state-referencing path
// constraints (phi), and the chaining algebra that composes them.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "annotary/evm/state.hpp"
#include "annotary/evm/term.hpp"
#include "annotary/solver/solver.hpp"
#include "annotary/symexec/explorer.hpp"

namespace annotary::traces {

using evm::Word;

enum class TraceKind { Constructor, Message, Violating };

// Distinguished delta/reads key for the analyzed account's ether balance.
Word balance_key();

struct TransactionTrace {
  TraceKind kind = TraceKind::Message;
  bool constructed = false;  // the chain behind this trace starts with a
                             // constructor trace

  // state key (simplified storage slot expression, or balance_key()) -> value
  std::map<Word, Word, evm::WordIdLess> delta;
  // pre-state reads: state key -> the state-origin symbol handed out for it
  std::map<Word, Word, evm::WordIdLess> reads;

  solver::ConstraintSet phi;        // constraints referencing prior state
  solver::ConstraintSet execution;  // full path constraints

  struct Meta {
    int tx_depth = 1;
    std::vector<std::string> functions;  // signature/selector per transaction
    std::set<std::string> storage_vars;  // state-origin symbols in phi+delta
    std::set<std::string> tx_vars;       // every other symbol
  } meta;

  // violating traces only
  int annotation_id = -1;
  uint64_t invalid_code_id = 0;
  uint32_t invalid_pc = 0;

  bool is_violating() const { return kind == TraceKind::Violating; }
};

// Terminals at STOP/RETURN become constructor or message traces; terminals
// labeled Violating become violating traces. Ignore-labeled states, reverted
// or self-destructed paths, unchanged-delta message traces, and traces with
// unsatisfiable path constraints are dropped (violating traces are kept even
// when unsatisfiable so they can be reported as such).
std::vector<TransactionTrace> extract_traces(const symexec::StateSpace& space,
                                             const evm::u256& address,
                                             solver::Solver& solver);

// t1 before t2: substitutes t1's delta into t2's state symbols, unifies
// common pre-state reads, renames colliding transaction symbols, unions the
// constraints, and rejects unsatisfiable compositions with nullopt.
std::optional<TransactionTrace> chain(const TransactionTrace& t1,
                                      const TransactionTrace& t2,
                                      solver::Solver& solver);

// Satisfiability of the trace's constraints (full execution set for
// violating traces). Unknown propagates as a tri-state.
solver::SatKind validity(const TransactionTrace& t, solver::Solver& solver);

// True when phi references no state-origin symbols: the trace runs the same
// from any contract state.
bool is_state_independent(const TransactionTrace& t);

// State-origin (storage/balance) symbol names occurring in the set.
std::set<std::string> state_symbols(const solver::ConstraintSet& cs);

// Recomputes meta.storage_vars / meta.tx_vars from the trace contents.
void refresh_symbol_sets(TransactionTrace& t);

nlohmann::json to_json(const TransactionTrace& t);

}  // namespace annotary::traces
