#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace annotary::evm {

// 256-bit machine word with modulo-2^256 arithmetic.
using u256 = boost::multiprecision::uint256_t;
using s512 = boost::multiprecision::int512_t;
using u512 = boost::multiprecision::uint512_t;

constexpr unsigned kWordBytes = 32;

inline u256 u256_max() { return ~u256(0); }

// Sign bit interpretation for SDIV/SMOD/SLT/SGT.
inline bool is_negative(const u256& v) { return boost::multiprecision::bit_test(v, 255); }

inline u256 twos_negate(const u256& v) { return ~v + 1; }

// Signed magnitude as 512-bit to avoid overflow on negate.
inline s512 to_signed(const u256& v) {
  if (is_negative(v)) return -s512(twos_negate(v));
  return s512(v);
}

inline u256 from_signed(const s512& v) {
  if (v < 0) return twos_negate(u256(-v));
  return u256(v);
}

std::string to_hex(const u256& v);           // minimal, no 0x prefix
std::string to_hex_full(const u256& v);      // 64 nibbles, no 0x prefix
std::string to_dec(const u256& v);

// Parses decimal or 0x-prefixed hex. Returns nullopt on malformed input.
std::optional<u256> parse_u256(const std::string& text);

// Hex string (optional 0x prefix) to bytes. Odd-length input is rejected.
std::optional<std::vector<uint8_t>> parse_hex_bytes(const std::string& hex);
std::string bytes_to_hex(const std::vector<uint8_t>& bytes);

u256 bytes_to_word(const uint8_t* data, size_t len);  // big-endian, len <= 32
void word_to_bytes(const u256& v, uint8_t out[32]);

}  // namespace annotary::evm
