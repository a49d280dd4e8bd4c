#include "annotary/evm/state.hpp"

namespace annotary::evm {

std::shared_ptr<const CodeObject> CodeObject::make(std::vector<uint8_t> bytes,
                                                  std::string label, uint64_t id) {
  auto obj = std::make_shared<CodeObject>();
  obj->id = id;
  obj->bytes = std::move(bytes);
  obj->label = std::move(label);
  obj->instructions = decode(obj->bytes);
  for (size_t i = 0; i < obj->instructions.size(); ++i) {
    obj->offset_to_index[obj->instructions[i].offset] = i;
    if (obj->instructions[i].opcode == Opcode::JUMPDEST && obj->instructions[i].valid)
      obj->jumpdests.insert(obj->instructions[i].offset);
  }
  return obj;
}

const Instruction* CodeObject::at_offset(uint32_t offset) const {
  auto it = offset_to_index.find(offset);
  if (it == offset_to_index.end()) return nullptr;
  return &instructions[it->second];
}

Word StorageMap::symbol_for(const Word& key, const std::string& instance_tag) {
  return symbol("storage_" + instance_tag + "[" + to_string(key) + "]", SymOrigin::Storage);
}

Word StorageMap::read(const Word& key_in, const std::string& instance_tag) {
  Word key = simplify(key_in);
  auto it = entries_.find(key);
  if (it != entries_.end()) return it->second;
  if (mode == StorageMode::ConcreteDefaultZero) return concrete(0);
  auto init = initial_reads_.find(key);
  if (init != initial_reads_.end()) return init->second;
  Word sym = symbol_for(key, instance_tag);
  initial_reads_.emplace(key, sym);
  return sym;
}

void StorageMap::write(const Word& key_in, const Word& value) {
  entries_[simplify(key_in)] = simplify(value);
}

BlockContext BlockContext::symbolic(const std::string& tag) {
  BlockContext b;
  b.number = symbol("block_number_" + tag, SymOrigin::BlockContext);
  b.timestamp = symbol("block_timestamp_" + tag, SymOrigin::BlockContext);
  b.coinbase = symbol("block_coinbase_" + tag, SymOrigin::BlockContext);
  b.difficulty = symbol("block_difficulty_" + tag, SymOrigin::BlockContext);
  b.gaslimit = symbol("block_gaslimit_" + tag, SymOrigin::BlockContext);
  return b;
}

Word CalldataBuffer::load_word(const Word& offset_in, std::vector<std::string>* warnings) {
  Word offset = simplify(offset_in);
  if (symbolic) {
    if (offset->is_concrete()) {
      return symbol("calldata_" + instance_tag + "_" + to_dec(offset->value),
                    SymOrigin::Calldata);
    }
    if (warnings)
      warnings->push_back("symbolic calldata offset " + to_string(offset) +
                          "; read widened to a fresh symbol");
    return symbol("calldata_" + instance_tag + "_at_" + std::to_string(offset->id),
                  SymOrigin::Calldata);
  }
  if (!offset->is_concrete()) {
    if (warnings)
      warnings->push_back("symbolic offset into concrete call payload; fresh symbol");
    return symbol("calldata_" + instance_tag + "_at_" + std::to_string(offset->id),
                  SymOrigin::Calldata);
  }
  uint64_t off = static_cast<uint64_t>(offset->value & u256(UINT64_MAX));
  std::vector<MemByte> slice;
  for (uint64_t i = 0; i < 32; ++i)
    slice.push_back(off + i < buffer.size() ? buffer[off + i] : concrete_byte(0));
  return word_of_bytes(slice);
}

Word CalldataBuffer::size_word() const {
  if (symbolic) return symbol("calldatasize_" + instance_tag, SymOrigin::Calldata);
  return concrete(u256(buffer.size()));
}

}  // namespace annotary::evm
