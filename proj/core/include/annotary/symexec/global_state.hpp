#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "annotary/evm/state.hpp"
#include "annotary/solver/constraints.hpp"

namespace annotary::symexec {

using evm::AccountState;
using evm::CodeRef;
using evm::ExecutionEnv;
using evm::MachineState;
using evm::MemByte;
using evm::u256;
using evm::Word;
using evm::BoolTerm;

enum class StateLabel { Violating, Ignore };
enum class TerminalKind { Stop, Return, Revert, SelfDestruct, Invalid };
enum class CallKind { Call, StaticCall, DelegateCall, CallCode, Create };

// hash-result (or hash-result + offset) expression -> preimage derivation
using KeccakMap = std::map<Word, Word, evm::WordIdLess>;

struct TxMeta {
  std::optional<std::string> function_signature;
  std::optional<uint32_t> selector;
  int tx_index = 0;
  std::string instance_tag;  // prefix of every symbol minted in this transaction
};

// One nesting level of message execution. frames.back() is active.
struct Frame {
  ExecutionEnv env;
  MachineState machine;
  CallKind kind = CallKind::Call;
  // caller-side world, restored when this frame reverts or fails
  std::map<u256, AccountState> world_snapshot;
  uint64_t ret_offset = 0, ret_len = 0;  // caller memory region for output
  u256 create_address = 0;               // CREATE result on success
};

// Recorded when unresolvable delegate-family code forces a storage reset.
struct DelegateReset {
  u256 account = 0;
  uint64_t code_id = 0;
  uint32_t pc = 0;
};

// A prior SHA3 application, kept for functional-consistency axioms.
struct Sha3Application {
  std::vector<Word> inputs;
  Word result;
};

// One SSTORE performed along the path, for write-restriction analysis.
struct SStoreEvent {
  u256 account = 0;
  Word key;
  Word value;
  uint64_t code_id = 0;
  uint32_t pc = 0;
  bool in_creation = false;  // top-level transaction was a deployment
};

struct GlobalState {
  std::map<u256, AccountState> world;            // sigma
  std::vector<Frame> frames;
  solver::ConstraintSet constraints;             // Phi
  KeccakMap keccak_map;
  std::set<StateLabel> labels;
  TxMeta tx_meta;

  std::optional<TerminalKind> terminal;
  std::string halt_reason;
  std::vector<MemByte> return_data;              // top-level output
  uint64_t invalid_code_id = 0;
  uint32_t invalid_pc = 0;                       // site of a terminal Invalid
  int violated_annotation = -1;                  // set by labeling

  uint64_t jumps_taken = 0;
  std::map<std::pair<uint64_t, uint32_t>, unsigned> backedge_counts;
  std::set<std::pair<uint64_t, uint32_t>> visited;  // (code id, byte offset)
  std::vector<std::string> warnings;
  std::vector<DelegateReset> delegate_resets;
  std::vector<SStoreEvent> sstore_log;
  std::vector<Sha3Application> sha3_applications;
  uint64_t fresh_counter = 0;
  uint64_t create_counter = 0;
  // bumped when unresolvable delegate code invalidates an account's storage,
  // so renamed symbols never collide with pre-reset ones
  std::map<u256, unsigned> storage_generation;

  Frame& frame() { return frames.back(); }
  const Frame& frame() const { return frames.back(); }
  ExecutionEnv& env() { return frames.back().env; }
  const ExecutionEnv& env() const { return frames.back().env; }
  MachineState& machine() { return frames.back().machine; }
  const MachineState& machine() const { return frames.back().machine; }

  int call_depth() const { return static_cast<int>(frames.size()) - 1; }
  bool is_terminal() const { return terminal.has_value(); }
  bool has_label(StateLabel l) const { return labels.count(l) != 0; }

  // Fetches or creates a code-less account with a symbolic balance.
  AccountState& account(const u256& address);

  // Deterministic per-path fresh symbol: <instance_tag>_<stem>_<n>.
  Word fresh_symbol(const std::string& stem, evm::SymOrigin origin);

  std::string storage_tag(const u256& address) const;
  std::string balance_tag(const u256& address) const;

  void halt(TerminalKind kind, std::string reason = {});
};

}  // namespace annotary::symexec
