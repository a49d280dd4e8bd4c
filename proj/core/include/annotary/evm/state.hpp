#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "annotary/evm/instruction.hpp"
#include "annotary/evm/memory.hpp"
#include "annotary/evm/term.hpp"

namespace annotary::evm {

constexpr unsigned kMaxStackDepth = 1024;

// Decoded code shared by every frame/state executing it.
struct CodeObject {
  uint64_t id = 0;  // stable per analysis run
  std::vector<uint8_t> bytes;
  std::vector<Instruction> instructions;
  std::map<uint32_t, size_t> offset_to_index;
  std::set<uint32_t> jumpdests;
  std::string label;  // e.g. "Token:runtime", for reports

  static std::shared_ptr<const CodeObject> make(std::vector<uint8_t> bytes,
                                                std::string label, uint64_t id);
  const Instruction* at_offset(uint32_t offset) const;
};
using CodeRef = std::shared_ptr<const CodeObject>;

enum class StorageMode { ConcreteDefaultZero, Symbolic };

// sigma[a]_s with the concrete/symbolic read policy.
class StorageMap {
 public:
  StorageMode mode = StorageMode::ConcreteDefaultZero;

  // Canonicalizes the key, then reads. In symbolic mode an unwritten key
  // yields a deterministic storage-origin symbol recorded in initial_reads.
  Word read(const Word& key, const std::string& instance_tag);
  void write(const Word& key, const Word& value);

  const std::map<Word, Word, WordIdLess>& entries() const { return entries_; }
  const std::map<Word, Word, WordIdLess>& initial_reads() const { return initial_reads_; }

  // Deterministic symbol a fresh read of `key` would produce.
  static Word symbol_for(const Word& key, const std::string& instance_tag);

 private:
  std::map<Word, Word, WordIdLess> entries_;
  std::map<Word, Word, WordIdLess> initial_reads_;  // key -> symbol handed out
};

struct AccountState {
  u256 address = 0;  // 160-bit
  Word balance;
  StorageMap storage;
  CodeRef code;  // runtime code; null/empty for wallets
};

struct BlockContext {
  Word number, timestamp, coinbase, difficulty, gaslimit;
  static BlockContext symbolic(const std::string& instance_tag);
};

// Input buffer of one execution: fully symbolic at transaction level,
// a concrete-indexed byte buffer for nested message calls.
struct CalldataBuffer {
  bool symbolic = true;
  std::string instance_tag;      // names the per-transaction symbols
  std::vector<MemByte> buffer;   // nested-call payload when !symbolic

  Word load_word(const Word& offset, std::vector<std::string>* warnings);
  Word size_word() const;
};

struct ExecutionEnv {
  u256 active_account = 0;  // I_a
  Word sender;              // I_s
  Word origin;              // I_o
  Word callvalue;           // I_v
  CodeRef code;             // I_b: the code being executed
  CalldataBuffer calldata;  // I_d
  BlockContext block;       // I_H subset
  bool is_static = false;   // STATICCALL frame: SSTORE forbidden
  bool is_creation = false;
  size_t creation_args_len = 0;  // appended constructor-argument bytes
  u256 storage_account = 0; // account whose storage SSTORE/SLOAD touch
};

struct MachineState {
  std::vector<Word> stack;
  Memory memory;
  uint32_t pc = 0;  // byte offset, always at an instruction boundary
  int64_t step_budget = 0;
  std::vector<MemByte> returndata;  // mu_o of the most recent nested call
};

}  // namespace annotary::evm
