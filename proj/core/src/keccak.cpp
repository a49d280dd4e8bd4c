#include "annotary/evm/keccak.hpp"

#include <cstring>

namespace annotary::evm {

namespace {

constexpr uint64_t kRoundConstants[24] = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL};

constexpr int kRotations[25] = {0,  1,  62, 28, 27, 36, 44, 6,  55, 20, 3,  10, 43,
                                25, 39, 41, 45, 15, 21, 8,  18, 2,  61, 56, 14};

inline uint64_t rotl(uint64_t x, int n) {
  return n == 0 ? x : (x << n) | (x >> (64 - n));
}

void keccak_f1600(uint64_t a[25]) {
  for (int round = 0; round < 24; ++round) {
    uint64_t c[5], d[5];
    for (int x = 0; x < 5; ++x)
      c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
    for (int x = 0; x < 5; ++x) {
      d[x] = c[(x + 4) % 5] ^ rotl(c[(x + 1) % 5], 1);
      for (int y = 0; y < 5; ++y) a[x + 5 * y] ^= d[x];
    }
    uint64_t b[25];
    for (int x = 0; x < 5; ++x)
      for (int y = 0; y < 5; ++y) {
        int src = x + 5 * y;
        int dstX = y;
        int dstY = (2 * x + 3 * y) % 5;
        b[dstX + 5 * dstY] = rotl(a[src], kRotations[src]);
      }
    for (int x = 0; x < 5; ++x)
      for (int y = 0; y < 5; ++y)
        a[x + 5 * y] = b[x + 5 * y] ^ (~b[(x + 1) % 5 + 5 * y] & b[(x + 2) % 5 + 5 * y]);
    a[0] ^= kRoundConstants[round];
  }
}

}  // namespace

std::array<uint8_t, 32> keccak256(const uint8_t* data, size_t len) {
  constexpr size_t rate = 136;  // 1088-bit rate for 256-bit output
  uint64_t state[25] = {0};
  uint8_t block[rate];

  size_t offset = 0;
  while (len - offset >= rate) {
    for (size_t i = 0; i < rate / 8; ++i) {
      uint64_t w = 0;
      for (int b = 7; b >= 0; --b) w = (w << 8) | data[offset + i * 8 + b];
      state[i] ^= w;
    }
    keccak_f1600(state);
    offset += rate;
  }

  size_t rem = len - offset;
  std::memset(block, 0, rate);
  if (rem) std::memcpy(block, data + offset, rem);
  block[rem] ^= 0x01;  // keccak (not SHA-3) domain padding
  block[rate - 1] ^= 0x80;
  for (size_t i = 0; i < rate / 8; ++i) {
    uint64_t w = 0;
    for (int b = 7; b >= 0; --b) w = (w << 8) | block[i * 8 + b];
    state[i] ^= w;
  }
  keccak_f1600(state);

  std::array<uint8_t, 32> out;
  for (size_t i = 0; i < 4; ++i)
    for (int b = 0; b < 8; ++b) out[i * 8 + b] = static_cast<uint8_t>(state[i] >> (8 * b));
  return out;
}

std::array<uint8_t, 32> keccak256(const std::vector<uint8_t>& data) {
  return keccak256(data.data(), data.size());
}

std::array<uint8_t, 32> keccak256(const std::string& data) {
  return keccak256(reinterpret_cast<const uint8_t*>(data.data()), data.size());
}

u256 keccak256_word(const std::vector<uint8_t>& data) {
  auto h = keccak256(data);
  return bytes_to_word(h.data(), 32);
}

uint32_t compute_selector(const std::string& signature) {
  int depth = 0;
  for (char c : signature) {
    if (c == ' ' || c == '\t' || c == '\n')
      throw MalformedSignature("whitespace in function signature: " + signature);
    if (c == '(') ++depth;
    if (c == ')') {
      --depth;
      if (depth < 0) throw MalformedSignature("unbalanced parentheses: " + signature);
    }
  }
  if (depth != 0) throw MalformedSignature("unbalanced parentheses: " + signature);
  auto h = keccak256(signature);
  return (uint32_t(h[0]) << 24) | (uint32_t(h[1]) << 16) | (uint32_t(h[2]) << 8) | uint32_t(h[3]);
}

}  // namespace annotary::evm
