#include "annotary/evm/u256.hpp"

#include <sstream>

namespace annotary::evm {

std::string to_hex(const u256& v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

std::string to_hex_full(const u256& v) {
  std::string s = to_hex(v);
  return std::string(64 - s.size(), '0') + s;
}

std::string to_dec(const u256& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::optional<u256> parse_u256(const std::string& text) {
  if (text.empty()) return std::nullopt;
  try {
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
      return u256(text);
    for (char c : text)
      if (c < '0' || c > '9') return std::nullopt;
    return u256(text);
  } catch (...) {
    return std::nullopt;
  }
}

static int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::optional<std::vector<uint8_t>> parse_hex_bytes(const std::string& hex) {
  size_t start = 0;
  if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) start = 2;
  if ((hex.size() - start) % 2 != 0) return std::nullopt;
  std::vector<uint8_t> out;
  out.reserve((hex.size() - start) / 2);
  for (size_t i = start; i + 1 < hex.size() || i + 1 == hex.size(); i += 2) {
    if (i + 1 >= hex.size()) break;
    int hi = nibble(hex[i]), lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<uint8_t>(hi * 16 + lo));
  }
  return out;
}

std::string bytes_to_hex(const std::vector<uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

u256 bytes_to_word(const uint8_t* data, size_t len) {
  u256 v = 0;
  for (size_t i = 0; i < len && i < 32; ++i) v = (v << 8) | data[i];
  return v;
}

void word_to_bytes(const u256& v, uint8_t out[32]) {
  u256 t = v;
  for (int i = 31; i >= 0; --i) {
    out[i] = static_cast<uint8_t>(t & 0xff);
    t >>= 8;
  }
}

}  // namespace annotary::evm
