#include "doctest.h"

#include "annotary/solver/solver.hpp"
#include "support/term_eval.hpp"

using namespace annotary::evm;
using namespace annotary::solver;

TEST_CASE("sat with model") {
  Solver s;
  Word x = symbol("x", SymOrigin::Calldata);
  auto r = s.check({b_ugt(x, concrete(100)), b_ult(x, concrete(200))});
  REQUIRE(r.is_sat());
  REQUIRE(r.model.has_value());
  auto v = r.model->lookup("x");
  REQUIRE(v.has_value());
  CHECK(*v > 100);
  CHECK(*v < 200);
}

TEST_CASE("unsat") {
  Solver s;
  Word x = symbol("x", SymOrigin::Calldata);
  auto r = s.check({b_ugt(x, concrete(100)), b_ult(x, concrete(50))});
  CHECK(r.is_unsat());
}

TEST_CASE("model satisfies the constraints per the reference interpreter") {
  Solver s;
  Word x = symbol("x", SymOrigin::Calldata);
  Word y = symbol("y", SymOrigin::Storage);
  // overflow scenario: y + x wraps below y
  std::vector<BoolTerm> cs{b_ult(w_add(y, x), y), b_ugt(x, concrete(0))};
  auto r = s.check(cs);
  REQUIRE(r.is_sat());
  annotary::testing::Env env{{"x", *r.model->lookup("x")}, {"y", *r.model->lookup("y")}};
  for (const auto& c : cs) CHECK(annotary::testing::eval_bool(c, env));
}

TEST_CASE("modular arithmetic goes through 512 bits") {
  Solver s;
  Word x = symbol("x", SymOrigin::Calldata);
  // addmod(max, max, max-1) = 2, provable only with carry room
  Word am = w_addmod(x, x, concrete(u256_max() - 1));
  auto r = s.check({b_eq(x, concrete(u256_max())), b_not(b_eq(am, concrete(2)))});
  CHECK(r.is_unsat());
}

TEST_CASE("signed comparison") {
  Solver s;
  Word x = symbol("x", SymOrigin::Calldata);
  auto r = s.check({b_slt(x, concrete(0)), b_ugt(x, concrete(u256(1) << 200))});
  CHECK(r.is_sat());
}

TEST_CASE("literal false short circuits") {
  Solver s;
  auto before = s.queries();
  auto r = s.check({b_false()});
  CHECK(r.is_unsat());
  CHECK(s.queries() == before);
}

TEST_CASE("query cache") {
  Solver s;
  Word x = symbol("x", SymOrigin::Calldata);
  std::vector<BoolTerm> cs{b_eq(x, concrete(7))};
  s.check(cs);
  auto q = s.queries();
  s.check(cs);
  CHECK(s.queries() == q);
  CHECK(s.cache_hits() >= 1);
}

TEST_CASE("storage-style symbol names survive the pipe quoting") {
  Solver s;
  Word k = symbol("storage_0[0x2]", SymOrigin::Storage);
  auto r = s.check({b_eq(k, concrete(9))});
  REQUIRE(r.is_sat());
  CHECK(r.model->lookup("storage_0[0x2]") == u256(9));
}

TEST_CASE("bad backend command is an infrastructure error") {
  Solver s({"node", "/nonexistent/server.mjs"});
  Word x = symbol("x", SymOrigin::Calldata);
  CHECK_THROWS_AS(s.check({b_eq(x, concrete(1))}), SolverBackendError);
}
