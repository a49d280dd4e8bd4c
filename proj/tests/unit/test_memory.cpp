#include "doctest.h"

#include "annotary/evm/memory.hpp"

using namespace annotary::evm;

TEST_CASE("aligned word round trip") {
  Memory m;
  Word x = symbol("x", SymOrigin::Calldata);
  m.store_word(0, x);
  CHECK(m.load_word(0).get() == x.get());
  CHECK(m.active_size() == 32);
}

TEST_CASE("concrete words reassemble byte-wise") {
  Memory m;
  u256 v = parse_u256("0x112233445566778899aabbccddeeff00").value();
  m.store_word(64, concrete(v));
  CHECK(m.load_word(64)->is_concrete(v));
  // unaligned read across the boundary shifts correctly
  Word shifted = m.load_word(65);
  REQUIRE(shifted->is_concrete());
  CHECK(shifted->value == (v << 8));
  CHECK(m.load_byte(95).is_concrete());
  CHECK(m.load_byte(95).concrete_value() == 0x00);
  CHECK(m.load_byte(94).concrete_value() == 0xff);
}

TEST_CASE("untouched memory reads as zero") {
  Memory m;
  CHECK(m.load_word(0)->is_concrete(0));
  CHECK(m.load_byte(123).concrete_value() == 0);
  CHECK(m.active_size() == 0);
}

TEST_CASE("store byte and msize rounding") {
  Memory m;
  m.store_byte(33, concrete_byte(0xab));
  CHECK(m.active_size() == 64);
  CHECK(m.load_byte(33).concrete_value() == 0xab);
  m.touch(100, 1);
  CHECK(m.active_size() == 128);
  m.touch(100, 0);  // zero-length touch does not extend
  CHECK(m.active_size() == 128);
}

TEST_CASE("overwrite splits older word") {
  Memory m;
  Word x = symbol("x", SymOrigin::Storage);
  m.store_word(0, x);
  m.store_byte(5, concrete_byte(0x7f));
  Word w = m.load_word(0);
  // no longer the plain symbol, but byte 5 reads back concrete
  CHECK(w.get() != x.get());
  CHECK(m.load_byte(5).concrete_value() == 0x7f);
  CHECK(m.load_byte(4).src.get() == x.get());
}

TEST_CASE("split_runs groups by source") {
  Word x = symbol("x", SymOrigin::Calldata);
  std::vector<MemByte> bytes;
  for (uint8_t i = 0; i < 32; ++i) bytes.push_back({x, i});
  bytes.push_back(concrete_byte(0xaa));
  bytes.push_back(concrete_byte(0xbb));
  auto runs = split_runs(bytes);
  REQUIRE(runs.size() >= 2);
  CHECK(runs[0].full_word());
  CHECK(runs[0].src.get() == x.get());
}

TEST_CASE("word_of_bytes pads short slices") {
  // RETURN of 4 bytes: right-pad with zero to a full word
  std::vector<MemByte> four{concrete_byte(0xde), concrete_byte(0xad),
                            concrete_byte(0xbe), concrete_byte(0xef)};
  Word w = word_of_bytes(four);
  REQUIRE(w->is_concrete());
  CHECK(w->value == (u256(0xdeadbeef) << (28 * 8)));
}

TEST_CASE("concrete conversion helpers") {
  std::vector<uint8_t> data{1, 2, 3, 4};
  auto mem = from_concrete_bytes(data);
  auto back = as_concrete_bytes(mem);
  REQUIRE(back.has_value());
  CHECK(*back == data);
  mem.push_back({symbol("s", SymOrigin::Calldata), 31});
  CHECK(!as_concrete_bytes(mem).has_value());
}
