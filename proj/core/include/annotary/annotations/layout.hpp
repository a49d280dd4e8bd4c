#pragma once

#include <map>
#include <optional>
#include <string>

#include "annotary/annotations/ast.hpp"
#include "annotary/evm/u256.hpp"

namespace annotary::annotations {

enum class SlotKind { Scalar, Mapping, DynamicArray, StaticArray, Struct };

struct MemberSlot {
  evm::u256 slot = 0;
  unsigned byte_offset = 0;  // within the slot, from the low end
  unsigned byte_size = 32;
  evm::u256 slot_count = 1;  // >1 for static arrays spanning several slots
  SlotKind kind = SlotKind::Scalar;
  std::string type;
};

struct StorageLayout {
  std::map<std::string, MemberSlot> members;  // declaration name -> placement

  std::optional<MemberSlot> find(const std::string& name) const {
    auto it = members.find(name);
    if (it == members.end()) return std::nullopt;
    return it->second;
  }
  // every member whose placement uses `slot`
  std::vector<std::string> members_in_slot(const evm::u256& slot) const;
};

// Solidity placement rules over the C3-linearized member order: bases first,
// value types packed low-to-high, reference types on fresh slots.
StorageLayout derive_layout(const AstFile& file, const AstContract& contract);

// Byte size of a value type; 32 for anything slot-sized.
unsigned value_type_size(const std::string& type);

}  // namespace annotary::annotations
