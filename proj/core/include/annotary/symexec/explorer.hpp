#pragma once

#include <functional>
#include <memory>

#include "annotary/solver/solver.hpp"
#include "annotary/symexec/global_state.hpp"

namespace annotary::symexec {

struct ExplorationBounds {
  uint64_t max_jumps = 1ull << 14;
  int max_call_depth = 8;
  int64_t step_budget = 400000;  // instructions per explored path tree
  unsigned loop_bound = 3;       // back-edge repeats per path before Ignore
};

struct StateSpace {
  std::vector<std::shared_ptr<GlobalState>> terminals;
  size_t states_explored = 0;
  size_t states_pruned = 0;  // children dropped with Unsat path conditions
  std::set<std::pair<uint64_t, uint32_t>> visited;
  std::map<uint64_t, std::set<uint32_t>> instruction_offsets;  // per code id
  std::vector<std::string> warnings;

  // visited fraction of the decoded instructions of `code_id`
  double coverage(uint64_t code_id) const;
};

// Tracked index arithmetic: ADD on a tracked operand extends the map keyed
// by the simplified sum; SHA3 concatenates the (rewritten) input words.
void keccak_track_add(const Word& o1, const Word& o2, KeccakMap& m);
void keccak_track_sha3(const std::vector<Word>& input_words, const Word& result,
                       KeccakMap& m);

class Explorer {
 public:
  using CodeResolver = std::function<CodeRef(const u256& address)>;

  Explorer(solver::Solver& solver, ExplorationBounds bounds);

  void set_code_resolver(CodeResolver r) { resolver_ = std::move(r); }

  // Registers decoded code under a fresh id for coverage accounting.
  CodeRef register_code(std::vector<uint8_t> bytes, std::string label);

  // Executes the instruction at pc, returning the successor states.
  // JUMPI forks; children whose path condition is Unsat are dropped.
  std::vector<std::shared_ptr<GlobalState>> step(GlobalState& s);

  // Depth-first exhaustion of a single initial state up to the bounds.
  StateSpace explore(std::shared_ptr<GlobalState> initial);

  // Creation-code run: concrete zero-default storage, symbolic
  // constructor arguments appended past the known code.
  StateSpace exec_constructor(CodeRef creation_code, const u256& address,
                              TxMeta meta, size_t ctor_args_len_hint = 0,
                              std::map<u256, AccountState> world = {});

  // Runtime-code run: symbolic storage and calldata.
  StateSpace exec_message(CodeRef runtime_code, const u256& address,
                          TxMeta meta, std::map<u256, AccountState> world = {});

  GlobalState make_message_state(CodeRef runtime_code, const u256& address,
                                 TxMeta meta,
                                 std::map<u256, AccountState> world = {}) const;

  const ExplorationBounds& bounds() const { return bounds_; }
  size_t pruned() const { return pruned_; }

 private:
  void exec_instruction(GlobalState& s, std::vector<std::shared_ptr<GlobalState>>& out);
  void handle_call(GlobalState& s, CallKind kind, uint32_t site_offset);
  void return_from_frame(GlobalState& s);
  bool feasible(const GlobalState& s, const BoolTerm& extra);
  Word balance_of(GlobalState& s, const Word& address);

  solver::Solver& solver_;
  ExplorationBounds bounds_;
  CodeResolver resolver_;
  uint64_t next_code_id_ = 1;
  std::map<uint64_t, std::set<uint32_t>> code_offsets_;
  size_t pruned_ = 0;
};

}  // namespace annotary::symexec
