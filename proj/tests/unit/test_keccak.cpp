#include "doctest.h"

#include "annotary/evm/keccak.hpp"
#include "annotary/evm/u256.hpp"

using namespace annotary::evm;

namespace {
std::string hex_of(const std::array<uint8_t, 32>& d) {
  return bytes_to_hex(std::vector<uint8_t>(d.begin(), d.end()));
}
}  // namespace

TEST_CASE("known digests") {
  CHECK(hex_of(keccak256(std::string{})) ==
        "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470");
  CHECK(hex_of(keccak256(std::string{"abc"})) ==
        "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45");
  CHECK(hex_of(keccak256(std::string{"testing"})) ==
        "5f16f4c7f149ac4f9510d9cf8cf384038ad348b3bcdc01915f95de12df9d1b02");
}

TEST_CASE("rate boundary") {
  // 135, 136 and 137 byte inputs straddle the single-block limit
  std::string s135(135, 'a'), s136(136, 'a'), s137(137, 'a');
  CHECK(hex_of(keccak256(s135)) !=
        hex_of(keccak256(s136)));
  CHECK(hex_of(keccak256(s136)) !=
        hex_of(keccak256(s137)));
  // mapping-slot style input: 64 bytes
  std::vector<uint8_t> slot_input(64, 0);
  slot_input[63] = 1;  // key 0, slot 1
  CHECK(hex_of(keccak256(slot_input)) ==
        "a6eef7e35abe7026729641147f7915573c7e97b47efa546f5f6e3230263bcb49");
}

TEST_CASE("word form") {
  CHECK(keccak256_word({}) ==
        parse_u256("0xc5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470").value());
}

TEST_CASE("selectors") {
  CHECK(compute_selector("transfer(address,uint256)") == 0xa9059cbb);
  CHECK(compute_selector("balanceOf(address)") == 0x70a08231);
  CHECK(compute_selector("baz(uint32,bool)") == 0xcdcd77c0);
  CHECK(compute_selector("()") == compute_selector("()"));
  CHECK_THROWS_AS(compute_selector("foo (uint256)"), MalformedSignature);
  CHECK_THROWS_AS(compute_selector("foo(uint256"), MalformedSignature);
  CHECK_THROWS_AS(compute_selector("foo)uint256("), MalformedSignature);
}
