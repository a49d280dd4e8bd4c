#include "doctest.h"

#include <random>

#include "annotary/evm/term.hpp"
#include "support/term_eval.hpp"

using namespace annotary::evm;
using annotary::testing::Env;
using annotary::testing::eval_word;
using annotary::testing::eval_bool;

TEST_CASE("interning gives pointer equality") {
  Word a = w_add(symbol("x", SymOrigin::Fresh), concrete(1));
  Word b = w_add(symbol("x", SymOrigin::Fresh), concrete(1));
  CHECK(a.get() == b.get());
  CHECK(concrete(7).get() == concrete(7).get());
  CHECK(symbol("x", SymOrigin::Fresh).get() == symbol("x", SymOrigin::Fresh).get());
}

TEST_CASE("concrete folding matches the reference interpreter") {
  std::mt19937_64 rng(12345);
  auto rand_word = [&] {
    u256 v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 64) | rng();
    // bias toward small and boundary values
    switch (rng() % 4) {
      case 0: return u256(rng() % 7);
      case 1: return u256_max() - (rng() % 7);
      default: return v;
    }
  };
  using Bin = Word (*)(const Word&, const Word&);
  std::vector<std::pair<WordOp, Bin>> bins = {
      {WordOp::Add, w_add}, {WordOp::Sub, w_sub}, {WordOp::Mul, w_mul},
      {WordOp::Div, w_div}, {WordOp::SDiv, w_sdiv}, {WordOp::Mod, w_mod},
      {WordOp::SMod, w_smod}, {WordOp::And, w_and}, {WordOp::Or, w_or},
      {WordOp::Xor, w_xor}, {WordOp::Byte, w_byte}, {WordOp::Shl, w_shl},
      {WordOp::Shr, w_shr}, {WordOp::Sar, w_sar},
      {WordOp::SignExtend, w_signextend}, {WordOp::Exp, w_exp},
  };
  // The folded value is checked against the reference interpreter running
  // on the same operation applied to symbols, so the two computations share
  // no code.
  Word sa = symbol("a", SymOrigin::Fresh);
  Word sb = symbol("b", SymOrigin::Fresh);
  Word sm = symbol("m", SymOrigin::Fresh);
  for (int iter = 0; iter < 300; ++iter) {
    u256 x = rand_word(), y = rand_word();
    for (auto [op, f] : bins) {
      u256 xx = x, yy = y;
      if (op == WordOp::Exp) yy = yy % 300;       // keep the oracle loop cheap
      if (op == WordOp::SignExtend) xx = xx % 40;
      if (op == WordOp::Byte) xx = xx % 40;
      if (op == WordOp::Shl || op == WordOp::Shr || op == WordOp::Sar)
        xx = xx % 300;
      Word r = f(concrete(xx), concrete(yy));
      REQUIRE(r->is_concrete());
      Env env{{"a", xx}, {"b", yy}};
      Word sym_form = op == WordOp::Exp ? f(sa, concrete(yy)) : f(sa, sb);
      CHECK(r->value == eval_word(sym_form, env));
    }
    u256 m = rand_word();
    Env env{{"a", x}, {"b", y}, {"m", m}};
    CHECK(w_addmod(concrete(x), concrete(y), concrete(m))->value ==
          eval_word(w_addmod(sa, sb, sm), env));
    CHECK(w_mulmod(concrete(x), concrete(y), concrete(m))->value ==
          eval_word(w_mulmod(sa, sb, sm), env));
    CHECK(w_not(concrete(x))->value == ~x);
  }
}

TEST_CASE("division by zero yields zero") {
  CHECK(w_div(concrete(5), concrete(0))->value == 0);
  CHECK(w_sdiv(concrete(5), concrete(0))->value == 0);
  CHECK(w_mod(concrete(5), concrete(0))->value == 0);
  CHECK(w_smod(concrete(5), concrete(0))->value == 0);
  CHECK(w_addmod(concrete(5), concrete(6), concrete(0))->value == 0);
  CHECK(w_mulmod(concrete(5), concrete(6), concrete(0))->value == 0);
}

TEST_CASE("sdiv INT_MIN / -1 wraps") {
  u256 int_min = u256(1) << 255;
  CHECK(w_sdiv(concrete(int_min), concrete(u256_max()))->value == int_min);
}

TEST_CASE("identity rules") {
  Word x = symbol("x", SymOrigin::Calldata);
  CHECK(w_add(x, concrete(0)).get() == x.get());
  CHECK(w_add(concrete(0), x).get() == x.get());
  CHECK(w_sub(x, concrete(0)).get() == x.get());
  CHECK(w_mul(x, concrete(1)).get() == x.get());
  CHECK(w_mul(x, concrete(0))->is_concrete(0));
  CHECK(w_and(x, x).get() == x.get());
  CHECK(w_or(x, x).get() == x.get());
  CHECK(w_xor(x, x)->is_concrete(0));
  CHECK(w_not(w_not(x)).get() == x.get());
  CHECK(w_div(x, concrete(1)).get() == x.get());
  // reassociation of nested constant adds
  Word t = w_add(w_add(x, concrete(3)), concrete(4));
  CHECK(t.get() == w_add(x, concrete(7)).get());
  // commutative canonicalization
  CHECK(w_add(concrete(5), x).get() == w_add(x, concrete(5)).get());
  CHECK(w_mul(concrete(5), x).get() == w_mul(x, concrete(5)).get());
}

TEST_CASE("bool constructors") {
  Word x = symbol("x", SymOrigin::Calldata);
  CHECK(b_eq(x, x)->is_true());
  CHECK(b_eq(concrete(1), concrete(2))->is_false());
  CHECK(b_ult(concrete(1), concrete(2))->is_true());
  CHECK(b_ult(x, x)->is_false());
  CHECK(b_slt(concrete(u256_max()), concrete(0))->is_true());
  CHECK(b_sgt(concrete(0), concrete(u256_max()))->is_true());
  CHECK(b_not(b_true())->is_false());
  CHECK(b_not(b_not(b_eq(x, concrete(1)))).get() == b_eq(x, concrete(1)).get());
  CHECK(b_and(b_true(), b_eq(x, concrete(1))).get() == b_eq(x, concrete(1)).get());
  CHECK(b_and(b_false(), b_eq(x, concrete(1)))->is_false());
  CHECK(b_or(b_true(), b_eq(x, concrete(1)))->is_true());
  CHECK(b_or(b_false(), b_eq(x, concrete(1))).get() == b_eq(x, concrete(1)).get());
}

TEST_CASE("ite bridging recovers branch conditions") {
  Word x = symbol("x", SymOrigin::Calldata);
  BoolTerm c = b_ult(x, concrete(10));
  Word w = bool_to_word(c);
  // ISZERO on a materialized bool flips it
  CHECK(word_iszero(w).get() == b_not(c).get());
  CHECK(word_nonzero(w).get() == c.get());
  // EQ against 0/1 folds through
  CHECK(b_eq(w, concrete(0)).get() == b_not(c).get());
  CHECK(b_eq(w, concrete(1)).get() == c.get());
  CHECK(w_ite(b_true(), x, concrete(0)).get() == x.get());
  CHECK(w_ite(b_false(), x, concrete(0))->is_concrete(0));
  CHECK(bool_to_word(b_true())->is_concrete(1));
}

TEST_CASE("simplify is idempotent and value preserving") {
  std::mt19937_64 rng(99);
  Word x = symbol("x", SymOrigin::Calldata);
  Word y = symbol("y", SymOrigin::Storage);
  Word t = w_add(w_mul(x, concrete(3)),
                 w_ite(b_ult(y, concrete(100)), w_sub(y, x), w_xor(x, y)));
  Word s1 = simplify(t);
  CHECK(simplify(s1).get() == s1.get());
  for (int i = 0; i < 50; ++i) {
    Env env{{"x", u256(rng() % 1000)}, {"y", u256(rng() % 1000)}};
    CHECK(eval_word(t, env) == eval_word(s1, env));
  }
}

TEST_CASE("substitution is simultaneous") {
  Word x = symbol("x", SymOrigin::Storage);
  Word y = symbol("y", SymOrigin::Storage);
  // x := y, y := x swaps rather than cascading
  SubstitutionMap s{{x.get(), y}, {y.get(), x}};
  Word t = w_add(x, w_mul(y, concrete(2)));
  Word r = substitute(t, s);
  CHECK(r.get() == w_add(y, w_mul(x, concrete(2))).get());
  // replacements are not re-scanned
  SubstitutionMap s2{{x.get(), w_add(x, concrete(1))}};
  Word r2 = substitute(x, s2);
  CHECK(r2.get() == w_add(x, concrete(1)).get());
  // bool substitution descends through comparisons
  BoolTerm b = b_ult(x, concrete(5));
  CHECK(substitute(b, s).get() == b_ult(y, concrete(5)).get());
}

TEST_CASE("collect symbols") {
  Word x = symbol("x", SymOrigin::Calldata);
  Word y = symbol("y", SymOrigin::Storage);
  std::set<Word> syms;
  collect_symbols(w_add(x, w_ite(b_eq(y, concrete(1)), x, y)), syms);
  CHECK(syms.size() == 2);
  syms.clear();
  collect_symbols(b_ult(concrete(1), concrete(2)), syms);
  CHECK(syms.empty());
}

TEST_CASE("concat builds keccak derivations unfolded") {
  Word x = symbol("k", SymOrigin::Calldata);
  Word c = w_concat(x, concrete(3));
  REQUIRE(c->is_app());
  CHECK(c->op == WordOp::Concat);
}

TEST_CASE("symbolic exponent gets a deterministic stand-in") {
  Word x = symbol("x", SymOrigin::Calldata);
  Word e1 = w_exp(concrete(2), x);
  Word e2 = w_exp(concrete(2), x);
  CHECK(e1.get() == e2.get());
  CHECK(e1->is_symbol());
}

TEST_CASE("rendering is stable") {
  Word x = symbol("x", SymOrigin::Calldata);
  CHECK(to_string(w_add(x, concrete(1))) == "(add x 0x1)");
  CHECK(to_string(b_ult(x, concrete(2))) == "(< x 0x2)");
}
