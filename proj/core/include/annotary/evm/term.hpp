#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "annotary/evm/u256.hpp"

namespace annotary::evm {

class WordNode;
class BoolNode;
using Word = std::shared_ptr<const WordNode>;
using BoolTerm = std::shared_ptr<const BoolNode>;

enum class SymOrigin { Calldata, Storage, Balance, CallReturn, BlockContext, Fresh };

enum class WordOp {
  Add, Sub, Mul, Div, SDiv, Mod, SMod, AddMod, MulMod, Exp, SignExtend,
  And, Or, Xor, Not, Byte, Shl, Shr, Sar,
  Concat,  // keccak derivations only, never reaches the solver
  Ite,     // cond ? a : b, cond held in the node's guard slot
};

enum class CmpOp { Eq, Lt, Gt, Slt, Sgt };

enum class WordKind { Concrete, Symbol, App };
enum class BoolKind { True, False, Cmp, Not, And, Or };

// Interned, immutable term node. Pointer equality implies structural equality.
class WordNode {
 public:
  WordKind kind;
  uint64_t id;  // stable interning id, assigned in creation order

  // Concrete
  u256 value;
  // Symbol
  std::string name;
  SymOrigin origin = SymOrigin::Fresh;
  // App
  WordOp op = WordOp::Add;
  std::vector<Word> args;
  BoolTerm guard;  // Ite condition

  bool is_concrete() const { return kind == WordKind::Concrete; }
  bool is_symbol() const { return kind == WordKind::Symbol; }
  bool is_app() const { return kind == WordKind::App; }
  bool is_concrete(const u256& v) const { return is_concrete() && value == v; }
};

class BoolNode {
 public:
  BoolKind kind;
  uint64_t id;

  CmpOp cmp = CmpOp::Eq;
  Word lhs, rhs;                 // Cmp
  std::vector<BoolTerm> operands;  // Not/And/Or

  bool is_true() const { return kind == BoolKind::True; }
  bool is_false() const { return kind == BoolKind::False; }
  bool is_literal() const { return is_true() || is_false(); }
};

// --- smart constructors; all fold constants and apply identity rules ---

Word concrete(const u256& v);
Word symbol(const std::string& name, SymOrigin origin);
Word app(WordOp op, std::vector<Word> args, BoolTerm guard = nullptr);

Word w_add(const Word& a, const Word& b);
Word w_sub(const Word& a, const Word& b);
Word w_mul(const Word& a, const Word& b);
Word w_div(const Word& a, const Word& b);
Word w_sdiv(const Word& a, const Word& b);
Word w_mod(const Word& a, const Word& b);
Word w_smod(const Word& a, const Word& b);
Word w_addmod(const Word& a, const Word& b, const Word& m);
Word w_mulmod(const Word& a, const Word& b, const Word& m);
Word w_exp(const Word& a, const Word& b);
Word w_signextend(const Word& idx, const Word& v);
Word w_and(const Word& a, const Word& b);
Word w_or(const Word& a, const Word& b);
Word w_xor(const Word& a, const Word& b);
Word w_not(const Word& a);
Word w_byte(const Word& idx, const Word& v);
Word w_shl(const Word& shift, const Word& v);
Word w_shr(const Word& shift, const Word& v);
Word w_sar(const Word& shift, const Word& v);
Word w_concat(const Word& a, const Word& b);
Word w_ite(const BoolTerm& c, const Word& a, const Word& b);

BoolTerm b_true();
BoolTerm b_false();
BoolTerm b_lit(bool v);
BoolTerm b_cmp(CmpOp op, const Word& a, const Word& b);
BoolTerm b_eq(const Word& a, const Word& b);
BoolTerm b_ult(const Word& a, const Word& b);
BoolTerm b_ugt(const Word& a, const Word& b);
BoolTerm b_slt(const Word& a, const Word& b);
BoolTerm b_sgt(const Word& a, const Word& b);
BoolTerm b_not(const BoolTerm& a);
BoolTerm b_and(const BoolTerm& a, const BoolTerm& b);
BoolTerm b_or(const BoolTerm& a, const BoolTerm& b);

// EVM comparison/branch bridging: bool as 0/1 word and word as != 0 condition.
Word bool_to_word(const BoolTerm& b);
BoolTerm word_nonzero(const Word& w);   // w != 0
BoolTerm word_iszero(const Word& w);    // w == 0

// Re-runs every subterm through the smart constructors. Idempotent.
Word simplify(const Word& w);
BoolTerm simplify(const BoolTerm& b);

// Simultaneous substitution keyed on interned node identity. Replacements are
// inserted verbatim and never re-scanned.
using SubstitutionMap = std::map<const WordNode*, Word>;

Word substitute(const Word& w, const SubstitutionMap& s);
BoolTerm substitute(const BoolTerm& b, const SubstitutionMap& s);

// All symbols occurring in a term.
void collect_symbols(const Word& w, std::set<Word>& out);
void collect_symbols(const BoolTerm& b, std::set<Word>& out);

// Deterministic ordering for containers keyed by Word.
struct WordIdLess {
  bool operator()(const Word& a, const Word& b) const { return a->id < b->id; }
};

std::string to_string(const Word& w);
std::string to_string(const BoolTerm& b);
const char* op_name(WordOp op);
const char* cmp_name(CmpOp op);

}  // namespace annotary::evm
