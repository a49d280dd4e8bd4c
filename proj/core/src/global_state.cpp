#include "annotary/symexec/global_state.hpp"

namespace annotary::symexec {

using namespace annotary::evm;

AccountState& GlobalState::account(const u256& address) {
  auto it = world.find(address);
  if (it != world.end()) return it->second;
  AccountState acct;
  acct.address = address;
  acct.balance = symbol("balance_" + balance_tag(address), SymOrigin::Balance);
  acct.storage.mode = StorageMode::Symbolic;
  auto [pos, _] = world.emplace(address, std::move(acct));
  return pos->second;
}

Word GlobalState::fresh_symbol(const std::string& stem, SymOrigin origin) {
  return symbol(tx_meta.instance_tag + "_" + stem + "_" + std::to_string(fresh_counter++),
                origin);
}

std::string GlobalState::storage_tag(const u256& address) const {
  std::string tag = tx_meta.instance_tag + "@" + to_hex(address);
  auto it = storage_generation.find(address);
  if (it != storage_generation.end() && it->second > 0)
    tag += "~g" + std::to_string(it->second);
  return tag;
}

std::string GlobalState::balance_tag(const u256& address) const {
  return tx_meta.instance_tag + "@" + to_hex(address);
}

void GlobalState::halt(TerminalKind kind, std::string reason) {
  terminal = kind;
  halt_reason = std::move(reason);
}

}  // namespace annotary::symexec
