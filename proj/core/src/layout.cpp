#include "annotary/annotations/layout.hpp"

#include <algorithm>
#include <cctype>

namespace annotary::annotations {

using evm::u256;

unsigned value_type_size(const std::string& type) {
  if (type == "bool") return 1;
  if (type == "address" || type.rfind("contract ", 0) == 0) return 20;
  if (type == "byte") return 1;
  if (type.rfind("enum ", 0) == 0) return 1;
  auto num_suffix = [&](const std::string& prefix) -> int {
    if (type.rfind(prefix, 0) != 0) return -1;
    std::string rest = type.substr(prefix.size());
    if (rest.empty() || !std::all_of(rest.begin(), rest.end(),
                                     [](char c) { return std::isdigit(c); }))
      return -1;
    return std::stoi(rest);
  };
  if (int n = num_suffix("uint"); n > 0) return n / 8;
  if (int n = num_suffix("int"); n > 0) return n / 8;
  if (int n = num_suffix("bytes"); n > 0 && n <= 32) return n;
  if (type == "uint" || type == "int") return 32;
  return 32;
}

namespace {

struct Cursor {
  u256 slot = 0;
  unsigned offset = 0;

  void new_slot() {
    if (offset > 0) {
      ++slot;
      offset = 0;
    }
  }
  MemberSlot place_value(unsigned size, const std::string& type) {
    if (offset + size > 32) new_slot();
    MemberSlot m{slot, offset, size, 1, SlotKind::Scalar, type};
    offset += size;
    if (offset >= 32) { ++slot; offset = 0; }
    return m;
  }
  MemberSlot place_full(SlotKind kind, const std::string& type, u256 slots = 1) {
    new_slot();
    MemberSlot m{slot, 0, 32, slots, kind, type};
    slot += slots;
    return m;
  }
};

// "uint256[3]" -> element type and count; nullopt for dynamic arrays
std::optional<std::pair<std::string, uint64_t>> static_array_of(const std::string& type) {
  if (type.empty() || type.back() != ']') return std::nullopt;
  size_t open = type.rfind('[');
  if (open == std::string::npos) return std::nullopt;
  std::string count = type.substr(open + 1, type.size() - open - 2);
  if (count.empty()) return std::nullopt;
  return std::make_pair(type.substr(0, open), std::stoull(count));
}

}  // namespace

std::vector<std::string> StorageLayout::members_in_slot(const u256& slot) const {
  std::vector<std::string> out;
  for (const auto& [name, m] : members)
    if (m.slot <= slot && slot < m.slot + m.slot_count) out.push_back(name);
  return out;
}

StorageLayout derive_layout(const AstFile& file, const AstContract& contract) {
  StorageLayout layout;
  Cursor cur;

  // linearizedBaseContracts lists the most derived first; storage is laid
  // out base-first
  for (auto it = contract.linearized_bases.rbegin();
       it != contract.linearized_bases.rend(); ++it) {
    const AstContract* c = file.contract_by_id(*it);
    if (!c) continue;
    for (const auto& var : c->state_vars) {
      if (var.constant) continue;
      const std::string& t = var.type;
      if (t.rfind("mapping(", 0) == 0) {
        layout.members[var.name] = cur.place_full(SlotKind::Mapping, t);
      } else if (t == "string storage ref" || t == "bytes storage ref" ||
                 t == "string" || t == "bytes") {
        layout.members[var.name] = cur.place_full(SlotKind::DynamicArray, t);
      } else if (auto arr = static_array_of(t)) {
        unsigned esz = value_type_size(arr->first);
        uint64_t per_slot = 32 / esz;
        u256 slots = (arr->second + per_slot - 1) / per_slot;
        layout.members[var.name] =
            cur.place_full(SlotKind::StaticArray, t, slots == 0 ? 1 : slots);
      } else if (t.size() > 1 && t.substr(t.size() - 2) == "[]") {
        layout.members[var.name] = cur.place_full(SlotKind::DynamicArray, t);
      } else if (t.rfind("struct ", 0) == 0) {
        // conservative: one slot per struct member is not derivable from the
        // attribute string alone, reserve a single slot and mark the kind
        layout.members[var.name] = cur.place_full(SlotKind::Struct, t);
      } else {
        layout.members[var.name] = cur.place_value(value_type_size(t), t);
      }
    }
  }
  return layout;
}

}  // namespace annotary::annotations
