#include "annotary/chain/client.hpp"

#include <cstdlib>

#include "httplib.h"
#include "json.hpp"

namespace annotary::chain {

using evm::u256;
using nlohmann::json;

namespace {

// "http://host:port/path" with scheme, port, and path all optional.
struct ParsedUrl {
  std::string host;
  int port = 80;
  std::string path = "/";
};

ParsedUrl parse_url(std::string url) {
  ParsedUrl out;
  const std::string scheme = "http://";
  if (url.compare(0, scheme.size(), scheme) == 0) url.erase(0, scheme.size());
  auto slash = url.find('/');
  if (slash != std::string::npos) {
    out.path = url.substr(slash);
    url.erase(slash);
  }
  auto colon = url.find(':');
  if (colon != std::string::npos) {
    out.port = std::atoi(url.c_str() + colon + 1);
    url.erase(colon);
  }
  out.host = url;
  return out;
}

}  // namespace

std::string address_hex(const u256& address) {
  std::string full = evm::to_hex_full(address);
  return "0x" + full.substr(full.size() - 40);
}

ChainClient::ChainClient(EndpointOptions options)
    : options_(std::move(options)) {
  if (!options_.url.empty()) {
    ParsedUrl u = parse_url(options_.url);
    host_ = u.host;
    port_ = u.port;
    path_ = u.path;
  }
}

ChainClient::~ChainClient() = default;

std::optional<std::string> ChainClient::call(
    const std::string& method, const std::vector<std::string>& params) {
  if (!configured()) return std::nullopt;

  json req{{"jsonrpc", "2.0"},
           {"id", 1},
           {"method", method},
           {"params", params}};

  httplib::Client cli(host_, port_);
  cli.set_connection_timeout(0, options_.timeout_ms * 1000);
  cli.set_read_timeout(0, options_.timeout_ms * 1000);
  cli.set_write_timeout(0, options_.timeout_ms * 1000);

  ++requests_sent_;
  auto res = cli.Post(path_.c_str(), req.dump(), "application/json");
  if (!res || res->status != 200) return std::nullopt;

  json body = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded() || !body.is_object()) return std::nullopt;
  if (body.contains("error")) return std::nullopt;
  auto it = body.find("result");
  if (it == body.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

std::string ChainClient::block_tag_locked() {
  if (!pin_attempted_) {
    pin_attempted_ = true;
    if (auto result = call("eth_blockNumber", {}))
      pinned_ = evm::parse_u256(*result);
  }
  if (!pinned_) return {};
  return "0x" + evm::to_hex(*pinned_);
}

std::optional<u256> ChainClient::pinned_block() {
  std::lock_guard<std::mutex> lock(mutex_);
  block_tag_locked();
  return pinned_;
}

std::optional<std::vector<uint8_t>> ChainClient::get_code(const u256& address) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto cached = code_cache_.find(address);
  if (cached != code_cache_.end()) return cached->second;

  std::optional<std::vector<uint8_t>> out;
  std::string block = block_tag_locked();
  if (!block.empty())
    if (auto result = call("eth_getCode", {address_hex(address), block}))
      out = evm::parse_hex_bytes(*result);

  code_cache_[address] = out;
  return out;
}

std::optional<u256> ChainClient::get_storage_at(const u256& address,
                                                const u256& slot) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto key = std::make_pair(address, slot);
  auto cached = storage_cache_.find(key);
  if (cached != storage_cache_.end()) return cached->second;

  std::optional<u256> out;
  std::string block = block_tag_locked();
  if (!block.empty())
    if (auto result = call("eth_getStorageAt",
                           {address_hex(address), "0x" + evm::to_hex(slot),
                            block}))
      out = evm::parse_u256(*result);

  storage_cache_[key] = out;
  return out;
}

}  // namespace annotary::chain
