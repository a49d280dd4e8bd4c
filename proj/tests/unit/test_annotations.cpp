#include "doctest.h"

#include "annotary/annotations/annotation.hpp"
#include "annotary/annotations/ast.hpp"
#include "annotary/annotations/compile.hpp"
#include "annotary/annotations/labeling.hpp"
#include "annotary/annotations/layout.hpp"
#include "annotary/annotations/rewrite.hpp"
#include "annotary/evm/keccak.hpp"
#include "annotary/symexec/explorer.hpp"

using namespace annotary::annotations;
using namespace annotary::evm;
using namespace annotary::symexec;
using annotary::solver::Solver;

namespace {

Solver& shared_solver() {
  static Solver s;
  return s;
}

Compiler& shared_compiler() {
  static Compiler c;
  return c;
}

TxMeta meta(const std::string& tag) {
  TxMeta m;
  m.instance_tag = tag;
  return m;
}

const ContractArtifact& artifact(const CompileArtifacts& arts,
                                 const std::string& contract) {
  for (const auto& [key, art] : arts.contracts)
    if (key.size() >= contract.size() &&
        key.compare(key.size() - contract.size() - 1, std::string::npos,
                    ":" + contract) == 0)
      return art;
  REQUIRE_MESSAGE(false, "contract not found: " << contract);
  static ContractArtifact dummy;
  return dummy;
}

}  // namespace

TEST_CASE("parse_annotations finds the three expression kinds") {
  std::string src =
      "contract C {\n"
      "  // @check(x > 0)\n"
      "  /* @never(y == 2) */\n"
      "  // prose with an email @example and no annotation\n"
      "  // @invariant(total <= cap)\n"
      "}\n";
  auto parsed = parse_annotations(src, "c.sol");
  CHECK(parsed.diagnostics.empty());
  REQUIRE(parsed.annotations.size() == 3);

  CHECK(parsed.annotations[0].kind == AnnotationKind::Check);
  CHECK(parsed.annotations[0].expr_text == "x > 0");
  CHECK(parsed.annotations[0].line == 2);
  CHECK(parsed.annotations[0].id == 0);
  CHECK(src[parsed.annotations[0].byte_offset] == '@');

  CHECK(parsed.annotations[1].kind == AnnotationKind::Never);
  CHECK(parsed.annotations[1].expr_text == "y == 2");
  CHECK(parsed.annotations[1].line == 3);

  CHECK(parsed.annotations[2].kind == AnnotationKind::Invariant);
  CHECK(parsed.annotations[2].expr_text == "total <= cap");
  CHECK(parsed.annotations[2].line == 5);
  CHECK(parsed.annotations[2].id == 2);
}

TEST_CASE("parse_annotations handles nested parens and quoted parens") {
  std::string src = "// @check(f(a, g(b)) == \")\" || x > 0)\n";
  auto parsed = parse_annotations(src);
  REQUIRE(parsed.annotations.size() == 1);
  CHECK(parsed.annotations[0].expr_text == "f(a, g(b)) == \")\" || x > 0");
}

TEST_CASE("set_restricted grammar: members and allowed writers") {
  std::string src =
      "// @set_restricted(var=owner, Token.supply; "
      "func=constructor, mint, transfer(address,uint256))\n";
  auto parsed = parse_annotations(src);
  REQUIRE(parsed.annotations.size() == 1);
  const Annotation& a = parsed.annotations[0];
  CHECK(a.kind == AnnotationKind::SetRestricted);

  REQUIRE(a.members.size() == 2);
  CHECK(!a.members[0].contract.has_value());
  CHECK(a.members[0].member == "owner");
  CHECK(a.members[1].contract == "Token");
  CHECK(a.members[1].member == "supply");

  REQUIRE(a.allowed.size() == 3);
  CHECK(a.allowed[0].kind == AllowedKind::Constructor);
  CHECK(a.allowed[1].kind == AllowedKind::FunctionName);
  CHECK(a.allowed[1].text == "mint");
  CHECK(a.allowed[2].kind == AllowedKind::FunctionSignature);
  CHECK(a.allowed[2].text == "transfer(address,uint256)");
}

TEST_CASE("set_restricted with only a var clause allows nobody") {
  auto parsed = parse_annotations("// @set_restricted(var=owner)\n");
  REQUIRE(parsed.annotations.size() == 1);
  CHECK(parsed.annotations[0].members.size() == 1);
  CHECK(parsed.annotations[0].allowed.empty());
}

TEST_CASE("malformed annotations yield diagnostics and parsing continues") {
  std::string src =
      "// @check(x > 0\n"                 // unbalanced
      "// @never()\n"                     // empty condition
      "// @set_restricted(owner)\n"       // clause without '='
      "// @set_restricted(func=f)\n"      // no var clause
      "// @check(fine == 1)\n";
  auto parsed = parse_annotations(src);
  CHECK(parsed.diagnostics.size() == 4);
  REQUIRE(parsed.annotations.size() == 1);
  CHECK(parsed.annotations[0].expr_text == "fine == 1");
  CHECK(parsed.diagnostics[0].line == 1);
  CHECK(parsed.diagnostics[1].line == 2);
}

TEST_CASE("annotations inside string literals are not parsed") {
  auto parsed =
      parse_annotations("contract C { string s = \"// @check(x)\"; }\n");
  CHECK(parsed.annotations.empty());
  CHECK(parsed.diagnostics.empty());
}

TEST_CASE("decode_srcmap applies empty-field inheritance") {
  auto entries = decode_srcmap("0:10:0;;5:2;:4;8::1;-1:-1:-1");
  REQUIRE(entries.size() == 6);
  CHECK(entries[0].s == 0);  CHECK(entries[0].l == 10); CHECK(entries[0].f == 0);
  CHECK(entries[1].s == 0);  CHECK(entries[1].l == 10); CHECK(entries[1].f == 0);
  CHECK(entries[2].s == 5);  CHECK(entries[2].l == 2);  CHECK(entries[2].f == 0);
  CHECK(entries[3].s == 5);  CHECK(entries[3].l == 4);  CHECK(entries[3].f == 0);
  CHECK(entries[4].s == 8);  CHECK(entries[4].l == 4);  CHECK(entries[4].f == 1);
  CHECK(entries[5].s == -1); CHECK(entries[5].l == -1); CHECK(entries[5].f == -1);
}

TEST_CASE("check and never rewrite to asserts on the following line") {
  std::string src =
      "contract C {\n"
      "  function f(uint x) public {\n"
      "    // @check(x > 0)\n"
      "    // @never(x == 7)\n"
      "    x = x;\n"
      "  }\n"
      "}\n";
  auto parsed = parse_annotations(src);
  AstFile empty_ast;
  auto rw = rewrite_source(src, parsed, empty_ast);

  CHECK(rw.rewritten_source.find("assert((x > 0)); ") != std::string::npos);
  CHECK(rw.rewritten_source.find("assert(!(x == 7)); ") != std::string::npos);
  // the never-assert lands after its own comment line, before `x = x;`
  CHECK(rw.rewritten_source.find("assert(!(x == 7)); ") <
        rw.rewritten_source.find("x = x;"));
  REQUIRE(rw.ranges.size() == 2);
  CHECK(rw.ranges[0].annotation_id == 0);
  CHECK(rw.ranges[1].annotation_id == 1);
  CHECK(rw.ranges[0].is_assert);

  CHECK(strip_injected(rw) == src);
}

static const char* kLayoutSource = R"(pragma solidity ^0.4.24;
contract Base {
    uint128 a;
    uint64 b;
    address owner;
    mapping(address => uint256) balances;
    uint256 big;
}
contract Derived is Base {
    bool flag;
    uint8 small;
    uint256[3] arr;
    uint256 tail;
    function Derived() public {
        a = 1; b = 2; owner = address(3); big = 4;
        flag = true; small = 7; arr[1] = 9; tail = 5;
    }
}
)";

TEST_CASE("storage layout: packing, inheritance order, reference types") {
  auto arts = shared_compiler().compile({{"layout.sol", kLayoutSource}});
  auto ast = parse_ast(arts.asts.at("layout.sol"));
  const AstContract* derived = ast.contract_by_name("Derived");
  REQUIRE(derived != nullptr);
  auto layout = derive_layout(ast, *derived);

  auto expect = [&](const char* name, uint64_t slot, unsigned off,
                    unsigned size, SlotKind kind) {
    auto m = layout.find(name);
    REQUIRE_MESSAGE(m.has_value(), name);
    CHECK_MESSAGE(m->slot == u256(slot), name);
    CHECK_MESSAGE(m->byte_offset == off, name);
    if (kind == SlotKind::Scalar) CHECK_MESSAGE(m->byte_size == size, name);
    CHECK((m->kind == kind));
  };
  expect("a", 0, 0, 16, SlotKind::Scalar);
  expect("b", 0, 16, 8, SlotKind::Scalar);
  expect("owner", 1, 0, 20, SlotKind::Scalar);
  expect("balances", 2, 0, 32, SlotKind::Mapping);
  expect("big", 3, 0, 32, SlotKind::Scalar);
  expect("flag", 4, 0, 1, SlotKind::Scalar);
  expect("small", 4, 1, 1, SlotKind::Scalar);
  expect("arr", 5, 0, 32, SlotKind::StaticArray);
  expect("tail", 8, 0, 32, SlotKind::Scalar);

  auto shared = layout.members_in_slot(0);
  CHECK(shared.size() == 2);
}

TEST_CASE("derived layout matches the slots the constructor actually writes") {
  auto arts = shared_compiler().compile({{"layout.sol", kLayoutSource}});
  const ContractArtifact& art = artifact(arts, "Derived");

  Explorer ex(shared_solver(), {});
  auto code = ex.register_code(art.bin, "layout-ctor");
  auto space = ex.exec_constructor(code, 0xaa, meta("lay"));

  std::shared_ptr<GlobalState> deployed;
  for (const auto& t : space.terminals)
    if (t->terminal == TerminalKind::Return) deployed = t;
  REQUIRE(deployed != nullptr);

  const auto& storage = deployed->world.at(0xaa).storage;
  std::map<u256, u256> got;
  for (const auto& [k, v] : storage.entries()) {
    REQUIRE(k->is_concrete());
    REQUIRE(v->is_concrete());
    if (v->value != 0) got[k->value] = v->value;
  }

  std::map<u256, u256> expected{
      {0, (u256(2) << 128) | 1},        // a at offset 0, b at byte offset 16
      {1, 3},                           // owner
      {3, 4},                           // big
      {4, (u256(7) << 8) | 1},          // flag, small packed
      {6, 9},                           // arr[1] = slot 5 + 1
      {8, 5},                           // tail
  };
  CHECK(got == expected);
}

static const char* kInvariantSource = R"(pragma solidity ^0.4.24;
contract Base2 {
    uint256 total;
    function add(uint256 v) public { total += v; }
}
contract Holder is Base2 {
    // @invariant(total <= 100)
    function take(uint256 v) public returns (uint256) {
        if (v == 0) return 0;
        total -= v;
        return total;
    }
    function bail() public {
        return;
    }
}
)";

TEST_CASE("invariant rewriting: body ends, returns, inherited proxies") {
  auto arts = shared_compiler().compile({{"inv.sol", kInvariantSource}});
  auto ast = parse_ast(arts.asts.at("inv.sol"));
  auto parsed = parse_annotations(kInvariantSource, "inv.sol");
  REQUIRE(parsed.annotations.size() == 1);
  auto rw = rewrite_source(kInvariantSource, parsed, ast);
  CHECK(rw.warnings.empty());

  const std::string& out = rw.rewritten_source;
  INFO(out);
  // the value return gains a temp, the asserts, and a fresh return
  CHECK(out.find("var v_ann_") != std::string::npos);
  CHECK(out.find("assert(total <= 100); ") != std::string::npos);
  // inherited add() gets a proxy inside Holder
  CHECK(out.find("function ann_proxy_") != std::string::npos);
  CHECK(out.find("(uint256 p0) public { add(p0); assert(total <= 100); }") !=
        std::string::npos);

  // insertions only: deleting them restores the original byte-exactly
  CHECK(strip_injected(rw) == std::string(kInvariantSource));

  // the instrumented source still compiles
  auto arts2 = shared_compiler().compile({{"inv.sol", out}});
  CHECK(arts2.contracts.size() == 2);
}

TEST_CASE("label_states separates violated asserts from everything else") {
  std::string src = R"(pragma solidity ^0.4.24;
contract Gate {
    uint256 x;
    uint256 y;
    function set(uint256 v) public {
        x = v;
        // @check(x < 10)
    }
    function fix() public {
        y = 5;
        // @check(y == 5)
    }
}
)";
  auto arts = shared_compiler().compile({{"gate.sol", src}});
  auto ast = parse_ast(arts.asts.at("gate.sol"));
  auto parsed = parse_annotations(src, "gate.sol");
  REQUIRE(parsed.annotations.size() == 2);
  auto rw = rewrite_source(src, parsed, ast);
  CHECK(strip_injected(rw) == src);

  auto arts2 = shared_compiler().compile({{"gate.sol", rw.rewritten_source}});
  const ContractArtifact& art = artifact(arts2, "Gate");
  REQUIRE(arts2.source_list.size() == 1);

  Explorer ex(shared_solver(), {});
  auto code = ex.register_code(art.bin_runtime, "gate");
  auto space = ex.exec_message(code, 0xaa, meta("gate"));

  auto stats = label_states(space, code->id, decode(art.bin_runtime),
                            decode_srcmap(art.srcmap_runtime), rw.ranges, 0);

  // x < 10 is violable; y == 5 holds right after the write, so its assert's
  // failing branch is pruned as unsatisfiable
  CHECK(stats.violating == 1);
  int violated = -1;
  for (const auto& t : space.terminals)
    if (t->has_label(StateLabel::Violating)) {
      CHECK(t->terminal == TerminalKind::Invalid);
      violated = t->violated_annotation;
    }
  CHECK(violated == 0);

  // every other terminal is a normal halt or labeled Ignore
  for (const auto& t : space.terminals) {
    if (t->terminal == TerminalKind::Invalid)
      CHECK((t->has_label(StateLabel::Violating) ||
             t->has_label(StateLabel::Ignore)));
  }
}

TEST_CASE("rewrite reversibility holds across annotation mixes") {
  const char* sources[] = {
      "// @check(a)\nx\n",
      "contract C { function f() public { /* @never(b == 1) */ } }",
      "// @set_restricted(var=o; func=constructor)\ncontract C {}\n",
  };
  for (const char* s : sources) {
    auto parsed = parse_annotations(s);
    AstFile empty_ast;
    auto rw = rewrite_source(s, parsed, empty_ast);
    CHECK(strip_injected(rw) == std::string(s));
  }
}
