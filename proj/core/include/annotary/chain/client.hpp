#pragma once

// JSON-RPC client resolving concrete account code and storage from an
// Ethereum node. All queries are pinned to the block number observed when
// the client first talks to the node, so one analysis run sees a single
// consistent snapshot. Every failure mode (no endpoint, network error,
// malformed response) resolves to "unresolvable" — never an exception — and
// responses are cached so repeated queries are byte-identical within a run.

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "annotary/evm/u256.hpp"

namespace annotary::chain {

struct EndpointOptions {
  std::string url;           // empty: offline, everything unresolvable
  unsigned timeout_ms = 5000;
};

class ChainClient {
 public:
  explicit ChainClient(EndpointOptions options);
  ~ChainClient();

  bool configured() const { return !options_.url.empty(); }

  // Block number all queries are pinned to; fetched once. nullopt when the
  // endpoint is offline or unreachable.
  std::optional<evm::u256> pinned_block();

  // Runtime code of the account at the pinned block. Empty vector for
  // wallet (code-less) accounts; nullopt when unresolvable.
  std::optional<std::vector<uint8_t>> get_code(const evm::u256& address);

  // Storage word of the account at the pinned block; zero for unset slots;
  // nullopt when unresolvable.
  std::optional<evm::u256> get_storage_at(const evm::u256& address,
                                          const evm::u256& slot);

  size_t requests_sent() const { return requests_sent_; }

 private:
  // One JSON-RPC call; returns the "result" string or nullopt.
  std::optional<std::string> call(const std::string& method,
                                  const std::vector<std::string>& params);
  std::string block_tag_locked();

  EndpointOptions options_;
  std::string host_;
  int port_ = 80;
  std::string path_ = "/";

  std::mutex mutex_;
  bool pin_attempted_ = false;
  std::optional<evm::u256> pinned_;
  std::map<evm::u256, std::optional<std::vector<uint8_t>>> code_cache_;
  std::map<std::pair<evm::u256, evm::u256>, std::optional<evm::u256>>
      storage_cache_;
  size_t requests_sent_ = 0;
};

// 0x-prefixed, 40-nibble account address form used by the RPC convention.
std::string address_hex(const evm::u256& address);

}  // namespace annotary::chain
