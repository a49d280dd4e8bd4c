#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "annotary/evm/u256.hpp"

namespace annotary::evm {

// Keccak-256 (the pre-NIST padding variant used by Ethereum).
std::array<uint8_t, 32> keccak256(const uint8_t* data, size_t len);
std::array<uint8_t, 32> keccak256(const std::vector<uint8_t>& data);
std::array<uint8_t, 32> keccak256(const std::string& data);

u256 keccak256_word(const std::vector<uint8_t>& data);

struct MalformedSignature : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// First four bytes of keccak256 over the canonical signature string.
// Rejects signatures containing whitespace or unbalanced parentheses.
uint32_t compute_selector(const std::string& signature);

}  // namespace annotary::evm
