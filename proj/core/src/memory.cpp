#include "annotary/evm/memory.hpp"

namespace annotary::evm {

Word MemByte::value_word() const {
  if (!src) return concrete(0);
  return w_byte(concrete(index), src);
}

MemByte concrete_byte(uint8_t b) {
  // A concrete byte is byte 31 of the zero-extended word.
  return MemByte{concrete(u256(b)), 31};
}

Word ByteRun::value() const {
  if (full_word()) return src;
  unsigned shift = 8 * (32 - first_index - length);
  u256 mask = length == 32 ? u256_max() : (u256(1) << (8 * length)) - 1;
  return w_and(w_shr(concrete(shift), src), concrete(mask));
}

std::vector<ByteRun> split_runs(const std::vector<MemByte>& bytes) {
  std::vector<ByteRun> runs;
  for (const auto& b : bytes) {
    if (!runs.empty() && runs.back().src == b.src &&
        runs.back().first_index + runs.back().length == b.index &&
        runs.back().length < 32) {
      runs.back().length += 1;
    } else {
      runs.push_back(ByteRun{b.src ? b.src : concrete(0), b.index, 1});
    }
  }
  return runs;
}

void Memory::touch(uint64_t offset, uint64_t len) {
  if (len == 0) return;
  uint64_t end = offset + len;
  uint64_t rounded = (end + 31) / 32 * 32;
  if (rounded > msize_) msize_ = rounded;
}

void Memory::store_byte(uint64_t offset, const MemByte& b) {
  bytes_[offset] = b;
  touch(offset, 1);
}

void Memory::store_word(uint64_t offset, const Word& w) {
  for (unsigned i = 0; i < 32; ++i) bytes_[offset + i] = MemByte{w, static_cast<uint8_t>(i)};
  touch(offset, 32);
}

void Memory::store_bytes(uint64_t offset, const std::vector<MemByte>& bs) {
  for (size_t i = 0; i < bs.size(); ++i) bytes_[offset + i] = bs[i];
  touch(offset, bs.size());
}

MemByte Memory::load_byte(uint64_t offset) const {
  auto it = bytes_.find(offset);
  if (it == bytes_.end()) return concrete_byte(0);
  return it->second;
}

std::vector<MemByte> Memory::read_range(uint64_t offset, uint64_t len) const {
  std::vector<MemByte> out;
  out.reserve(len);
  for (uint64_t i = 0; i < len; ++i) out.push_back(load_byte(offset + i));
  return out;
}

Word Memory::load_word(uint64_t offset) const {
  return word_of_bytes(read_range(offset, 32));
}

std::optional<std::vector<uint8_t>> as_concrete_bytes(const std::vector<MemByte>& bytes) {
  std::vector<uint8_t> out;
  out.reserve(bytes.size());
  for (const auto& b : bytes) {
    if (!b.is_concrete()) return std::nullopt;
    out.push_back(b.concrete_value());
  }
  return out;
}

std::vector<MemByte> from_concrete_bytes(const std::vector<uint8_t>& bytes) {
  std::vector<MemByte> out;
  out.reserve(bytes.size());
  for (uint8_t b : bytes) out.push_back(concrete_byte(b));
  return out;
}

Word word_of_bytes(const std::vector<MemByte>& in) {
  std::vector<MemByte> bytes = in;
  while (bytes.size() < 32) bytes.push_back(concrete_byte(0));
  bytes.resize(32);

  if (auto conc = as_concrete_bytes(bytes))
    return concrete(bytes_to_word(conc->data(), conc->size()));

  auto runs = split_runs(bytes);
  if (runs.size() == 1 && runs[0].full_word()) return runs[0].src;

  Word acc = concrete(0);
  for (const auto& run : runs)
    acc = w_or(w_shl(concrete(8 * run.length), acc), run.value());
  return acc;
}

}  // namespace annotary::evm
