#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "annotary/evm/term.hpp"

namespace annotary::evm {

// One byte of the machine heap: byte `index` (0 = most significant) of the
// 256-bit word `src`. Keeping the source word allows aligned loads to
// reconstruct the stored word without extract/concat noise.
struct MemByte {
  Word src;
  uint8_t index = 31;

  bool is_concrete() const { return src && src->is_concrete(); }
  uint8_t concrete_value() const {
    return static_cast<uint8_t>((src->value >> (8 * (31 - index))) & 0xff);
  }
  Word value_word() const;  // zero-extended byte as a 256-bit term
};

MemByte concrete_byte(uint8_t b);

// A run of adjacent bytes sharing one source word.
struct ByteRun {
  Word src;
  unsigned first_index = 0;  // byte index within src
  unsigned length = 0;       // in bytes
  bool full_word() const { return first_index == 0 && length == 32; }
  Word value() const;  // the run's bytes as a right-aligned word
};

std::vector<ByteRun> split_runs(const std::vector<MemByte>& bytes);

// Concrete-indexed byte-addressable heap.
class Memory {
 public:
  void store_byte(uint64_t offset, const MemByte& b);
  void store_word(uint64_t offset, const Word& w);
  void store_bytes(uint64_t offset, const std::vector<MemByte>& bytes);
  MemByte load_byte(uint64_t offset) const;  // zero if untouched
  Word load_word(uint64_t offset) const;
  std::vector<MemByte> read_range(uint64_t offset, uint64_t len) const;
  uint64_t active_size() const { return msize_; }
  void touch(uint64_t offset, uint64_t len);

 private:
  std::map<uint64_t, MemByte> bytes_;
  uint64_t msize_ = 0;  // highest touched offset rounded up to 32
};

// All-concrete extraction; nullopt if any byte is symbolic.
std::optional<std::vector<uint8_t>> as_concrete_bytes(const std::vector<MemByte>& bytes);

std::vector<MemByte> from_concrete_bytes(const std::vector<uint8_t>& bytes);

// Word value of an arbitrary 32-byte slice (shorter slices are
// right-padded with zeros, as EVM RETURN/MLOAD semantics require).
Word word_of_bytes(const std::vector<MemByte>& bytes);

}  // namespace annotary::evm
