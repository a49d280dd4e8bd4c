#include "annotary/evm/term.hpp"

#include <cassert>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace annotary::evm {

namespace {

struct Interner {
  std::mutex mu;
  uint64_t next_id = 1;
  std::map<u256, Word> concretes;
  std::map<std::pair<std::string, int>, Word> symbols;
  std::map<std::vector<uint64_t>, Word> apps;
  std::map<std::vector<uint64_t>, BoolTerm> bools;

  static Interner& instance() {
    static Interner in;
    return in;
  }
};

Word intern_word(std::shared_ptr<WordNode> n) {
  auto& in = Interner::instance();
  std::lock_guard<std::mutex> lock(in.mu);
  switch (n->kind) {
    case WordKind::Concrete: {
      auto it = in.concretes.find(n->value);
      if (it != in.concretes.end()) return it->second;
      n->id = in.next_id++;
      Word w = n;
      in.concretes.emplace(n->value, w);
      return w;
    }
    case WordKind::Symbol: {
      auto key = std::make_pair(n->name, static_cast<int>(n->origin));
      auto it = in.symbols.find(key);
      if (it != in.symbols.end()) return it->second;
      n->id = in.next_id++;
      Word w = n;
      in.symbols.emplace(key, w);
      return w;
    }
    case WordKind::App: {
      std::vector<uint64_t> key;
      key.push_back(1000 + static_cast<uint64_t>(n->op));
      key.push_back(n->guard ? n->guard->id : 0);
      for (auto& a : n->args) key.push_back(a->id);
      auto it = in.apps.find(key);
      if (it != in.apps.end()) return it->second;
      n->id = in.next_id++;
      Word w = n;
      in.apps.emplace(std::move(key), w);
      return w;
    }
  }
  return nullptr;
}

BoolTerm intern_bool(std::shared_ptr<BoolNode> n) {
  auto& in = Interner::instance();
  std::lock_guard<std::mutex> lock(in.mu);
  std::vector<uint64_t> key;
  key.push_back(static_cast<uint64_t>(n->kind));
  key.push_back(static_cast<uint64_t>(n->cmp));
  key.push_back(n->lhs ? n->lhs->id : 0);
  key.push_back(n->rhs ? n->rhs->id : 0);
  for (auto& o : n->operands) key.push_back(o->id);
  auto it = in.bools.find(key);
  if (it != in.bools.end()) return it->second;
  n->id = in.next_id++;
  BoolTerm b = n;
  in.bools.emplace(std::move(key), b);
  return b;
}

u256 fold_shl(const u256& shift, const u256& v) {
  if (shift >= 256) return 0;
  return v << static_cast<unsigned>(shift);
}

u256 fold_shr(const u256& shift, const u256& v) {
  if (shift >= 256) return 0;
  return v >> static_cast<unsigned>(shift);
}

u256 fold_sar(const u256& shift, const u256& v) {
  bool neg = is_negative(v);
  if (shift >= 256) return neg ? u256_max() : u256(0);
  unsigned s = static_cast<unsigned>(shift);
  u256 r = v >> s;
  if (neg && s > 0) r |= (u256_max() << (256 - s));
  return r;
}

u256 fold_exp(const u256& base, const u256& exp) {
  u512 mod = u512(1) << 256;
  return u256(boost::multiprecision::powm(u512(base), u512(exp), mod));
}

u256 fold_signextend(const u256& idx, const u256& v) {
  if (idx >= 31) return v;
  unsigned t = static_cast<unsigned>(idx) * 8 + 7;
  if (boost::multiprecision::bit_test(v, t)) {
    return v | (u256_max() << (t + 1));
  }
  u256 mask = (u256(1) << (t + 1)) - 1;
  return v & mask;
}

u256 fold_byte(const u256& idx, const u256& v) {
  if (idx >= 32) return 0;
  unsigned i = static_cast<unsigned>(idx);
  return (v >> (8 * (31 - i))) & 0xff;
}

bool commutative(WordOp op) {
  switch (op) {
    case WordOp::Add: case WordOp::Mul: case WordOp::And:
    case WordOp::Or: case WordOp::Xor:
      return true;
    default:
      return false;
  }
}

}  // namespace

Word concrete(const u256& v) {
  auto n = std::make_shared<WordNode>();
  n->kind = WordKind::Concrete;
  n->value = v;
  return intern_word(std::move(n));
}

Word symbol(const std::string& name, SymOrigin origin) {
  auto n = std::make_shared<WordNode>();
  n->kind = WordKind::Symbol;
  n->name = name;
  n->origin = origin;
  return intern_word(std::move(n));
}

Word app(WordOp op, std::vector<Word> args, BoolTerm guard) {
  auto n = std::make_shared<WordNode>();
  n->kind = WordKind::App;
  n->op = op;
  n->args = std::move(args);
  n->guard = std::move(guard);
  return intern_word(std::move(n));
}

static Word binop(WordOp op, Word a, Word b) {
  if (commutative(op) && (a->is_concrete() || (!b->is_concrete() && a->id > b->id)))
    std::swap(a, b);  // concrete operand last, otherwise order by id
  return app(op, {a, b});
}

Word w_add(const Word& a, const Word& b) {
  if (a->is_concrete() && b->is_concrete()) return concrete(a->value + b->value);
  if (a->is_concrete(0)) return b;
  if (b->is_concrete(0)) return a;
  // (x + c1) + c2 -> x + (c1 + c2)
  if (b->is_concrete() && a->is_app() && a->op == WordOp::Add && a->args[1]->is_concrete())
    return w_add(a->args[0], concrete(a->args[1]->value + b->value));
  if (a->is_concrete() && b->is_app() && b->op == WordOp::Add && b->args[1]->is_concrete())
    return w_add(b->args[0], concrete(b->args[1]->value + a->value));
  return binop(WordOp::Add, a, b);
}

Word w_sub(const Word& a, const Word& b) {
  if (a->is_concrete() && b->is_concrete()) return concrete(a->value - b->value);
  if (b->is_concrete(0)) return a;
  if (a == b) return concrete(0);
  return app(WordOp::Sub, {a, b});
}

Word w_mul(const Word& a, const Word& b) {
  if (a->is_concrete() && b->is_concrete()) return concrete(a->value * b->value);
  if (a->is_concrete(0) || b->is_concrete(0)) return concrete(0);
  if (a->is_concrete(1)) return b;
  if (b->is_concrete(1)) return a;
  return binop(WordOp::Mul, a, b);
}

Word w_div(const Word& a, const Word& b) {
  if (a->is_concrete() && b->is_concrete())
    return concrete(b->value == 0 ? u256(0) : a->value / b->value);
  if (b->is_concrete(1)) return a;
  if (a->is_concrete(0)) return concrete(0);
  return app(WordOp::Div, {a, b});
}

Word w_sdiv(const Word& a, const Word& b) {
  if (a->is_concrete() && b->is_concrete()) {
    if (b->value == 0) return concrete(0);
    s512 q = to_signed(a->value) / to_signed(b->value);
    return concrete(from_signed(q));
  }
  if (b->is_concrete(1)) return a;
  return app(WordOp::SDiv, {a, b});
}

Word w_mod(const Word& a, const Word& b) {
  if (a->is_concrete() && b->is_concrete())
    return concrete(b->value == 0 ? u256(0) : a->value % b->value);
  if (a == b) return concrete(0);
  return app(WordOp::Mod, {a, b});
}

Word w_smod(const Word& a, const Word& b) {
  if (a->is_concrete() && b->is_concrete()) {
    if (b->value == 0) return concrete(0);
    s512 la = to_signed(a->value), lb = to_signed(b->value);
    s512 r = la % lb;  // C++ remainder has the sign of the dividend, as EVM SMOD
    return concrete(from_signed(r));
  }
  return app(WordOp::SMod, {a, b});
}

Word w_addmod(const Word& a, const Word& b, const Word& m) {
  if (a->is_concrete() && b->is_concrete() && m->is_concrete()) {
    if (m->value == 0) return concrete(0);
    u512 s = u512(a->value) + u512(b->value);
    return concrete(u256(s % u512(m->value)));
  }
  return app(WordOp::AddMod, {a, b, m});
}

Word w_mulmod(const Word& a, const Word& b, const Word& m) {
  if (a->is_concrete() && b->is_concrete() && m->is_concrete()) {
    if (m->value == 0) return concrete(0);
    u512 s = u512(a->value) * u512(b->value);
    return concrete(u256(s % u512(m->value)));
  }
  return app(WordOp::MulMod, {a, b, m});
}

Word w_exp(const Word& a, const Word& b) {
  if (a->is_concrete() && b->is_concrete()) return concrete(fold_exp(a->value, b->value));
  if (b->is_concrete()) {
    if (b->value == 0) return concrete(1);
    if (b->value <= 8) {
      Word r = a;
      for (u256 i = 1; i < b->value; ++i) r = w_mul(r, a);
      return r;
    }
    // larger concrete exponents stay an Exp node; the solver printer
    // unrolls them by squaring
    return app(WordOp::Exp, {a, b});
  }
  // Symbolic exponent has no direct bit-vector encoding; a deterministic
  // uninterpreted stand-in keeps the path explorable.
  return symbol("exp_" + std::to_string(a->id) + "_" + std::to_string(b->id), SymOrigin::Fresh);
}

Word w_signextend(const Word& idx, const Word& v) {
  if (idx->is_concrete() && v->is_concrete()) return concrete(fold_signextend(idx->value, v->value));
  if (idx->is_concrete() && idx->value >= 31) return v;
  return app(WordOp::SignExtend, {idx, v});
}

Word w_and(const Word& a, const Word& b) {
  if (a->is_concrete() && b->is_concrete()) return concrete(a->value & b->value);
  if (a->is_concrete(0) || b->is_concrete(0)) return concrete(0);
  if (a->is_concrete() && a->value == u256_max()) return b;
  if (b->is_concrete() && b->value == u256_max()) return a;
  if (a == b) return a;
  return binop(WordOp::And, a, b);
}

Word w_or(const Word& a, const Word& b) {
  if (a->is_concrete() && b->is_concrete()) return concrete(a->value | b->value);
  if (a->is_concrete(0)) return b;
  if (b->is_concrete(0)) return a;
  if (a == b) return a;
  return binop(WordOp::Or, a, b);
}

Word w_xor(const Word& a, const Word& b) {
  if (a->is_concrete() && b->is_concrete()) return concrete(a->value ^ b->value);
  if (a->is_concrete(0)) return b;
  if (b->is_concrete(0)) return a;
  if (a == b) return concrete(0);
  return binop(WordOp::Xor, a, b);
}

Word w_not(const Word& a) {
  if (a->is_concrete()) return concrete(~a->value);
  if (a->is_app() && a->op == WordOp::Not) return a->args[0];
  return app(WordOp::Not, {a});
}

Word w_byte(const Word& idx, const Word& v) {
  if (idx->is_concrete() && v->is_concrete()) return concrete(fold_byte(idx->value, v->value));
  if (idx->is_concrete() && idx->value >= 32) return concrete(0);
  return app(WordOp::Byte, {idx, v});
}

Word w_shl(const Word& shift, const Word& v) {
  if (shift->is_concrete() && v->is_concrete()) return concrete(fold_shl(shift->value, v->value));
  if (shift->is_concrete(0)) return v;
  return app(WordOp::Shl, {shift, v});
}

Word w_shr(const Word& shift, const Word& v) {
  if (shift->is_concrete() && v->is_concrete()) return concrete(fold_shr(shift->value, v->value));
  if (shift->is_concrete(0)) return v;
  return app(WordOp::Shr, {shift, v});
}

Word w_sar(const Word& shift, const Word& v) {
  if (shift->is_concrete() && v->is_concrete()) return concrete(fold_sar(shift->value, v->value));
  if (shift->is_concrete(0)) return v;
  return app(WordOp::Sar, {shift, v});
}

Word w_concat(const Word& a, const Word& b) { return app(WordOp::Concat, {a, b}); }

Word w_ite(const BoolTerm& c, const Word& a, const Word& b) {
  if (c->is_true()) return a;
  if (c->is_false()) return b;
  if (a == b) return a;
  return app(WordOp::Ite, {a, b}, c);
}

BoolTerm b_true() {
  auto n = std::make_shared<BoolNode>();
  n->kind = BoolKind::True;
  return intern_bool(std::move(n));
}

BoolTerm b_false() {
  auto n = std::make_shared<BoolNode>();
  n->kind = BoolKind::False;
  return intern_bool(std::move(n));
}

BoolTerm b_lit(bool v) { return v ? b_true() : b_false(); }

BoolTerm b_cmp(CmpOp op, const Word& a, const Word& b) {
  if (a->is_concrete() && b->is_concrete()) {
    switch (op) {
      case CmpOp::Eq: return b_lit(a->value == b->value);
      case CmpOp::Lt: return b_lit(a->value < b->value);
      case CmpOp::Gt: return b_lit(a->value > b->value);
      case CmpOp::Slt: return b_lit(to_signed(a->value) < to_signed(b->value));
      case CmpOp::Sgt: return b_lit(to_signed(a->value) > to_signed(b->value));
    }
  }
  if (a == b) {
    switch (op) {
      case CmpOp::Eq: return b_true();
      default: return b_false();
    }
  }
  // (cond ? 1 : 0) == c collapses to cond / !cond
  if (op == CmpOp::Eq) {
    auto ite_vs_const = [](const Word& ite, const Word& c) -> BoolTerm {
      if (ite->is_app() && ite->op == WordOp::Ite && c->is_concrete() &&
          ite->args[0]->is_concrete() && ite->args[1]->is_concrete()) {
        if (c->value == ite->args[0]->value && c->value != ite->args[1]->value)
          return ite->guard;
        if (c->value == ite->args[1]->value && c->value != ite->args[0]->value)
          return b_not(ite->guard);
      }
      return nullptr;
    };
    if (auto r = ite_vs_const(a, b)) return r;
    if (auto r = ite_vs_const(b, a)) return r;
  }
  if (op == CmpOp::Lt && b->is_concrete(0)) return b_false();
  if (op == CmpOp::Gt && a->is_concrete(0)) return b_false();
  auto n = std::make_shared<BoolNode>();
  n->kind = BoolKind::Cmp;
  n->cmp = op;
  if (op == CmpOp::Eq && a->id > b->id) {
    n->lhs = b;
    n->rhs = a;
  } else {
    n->lhs = a;
    n->rhs = b;
  }
  return intern_bool(std::move(n));
}

BoolTerm b_eq(const Word& a, const Word& b) { return b_cmp(CmpOp::Eq, a, b); }
BoolTerm b_ult(const Word& a, const Word& b) { return b_cmp(CmpOp::Lt, a, b); }
BoolTerm b_ugt(const Word& a, const Word& b) { return b_cmp(CmpOp::Gt, a, b); }
BoolTerm b_slt(const Word& a, const Word& b) { return b_cmp(CmpOp::Slt, a, b); }
BoolTerm b_sgt(const Word& a, const Word& b) { return b_cmp(CmpOp::Sgt, a, b); }

BoolTerm b_not(const BoolTerm& a) {
  if (a->is_true()) return b_false();
  if (a->is_false()) return b_true();
  if (a->kind == BoolKind::Not) return a->operands[0];
  auto n = std::make_shared<BoolNode>();
  n->kind = BoolKind::Not;
  n->operands = {a};
  return intern_bool(std::move(n));
}

BoolTerm b_and(const BoolTerm& a, const BoolTerm& b) {
  if (a->is_false() || b->is_false()) return b_false();
  if (a->is_true()) return b;
  if (b->is_true()) return a;
  if (a == b) return a;
  auto n = std::make_shared<BoolNode>();
  n->kind = BoolKind::And;
  n->operands = a->id <= b->id ? std::vector<BoolTerm>{a, b} : std::vector<BoolTerm>{b, a};
  return intern_bool(std::move(n));
}

BoolTerm b_or(const BoolTerm& a, const BoolTerm& b) {
  if (a->is_true() || b->is_true()) return b_true();
  if (a->is_false()) return b;
  if (b->is_false()) return a;
  if (a == b) return a;
  auto n = std::make_shared<BoolNode>();
  n->kind = BoolKind::Or;
  n->operands = a->id <= b->id ? std::vector<BoolTerm>{a, b} : std::vector<BoolTerm>{b, a};
  return intern_bool(std::move(n));
}

Word bool_to_word(const BoolTerm& b) {
  if (b->is_true()) return concrete(1);
  if (b->is_false()) return concrete(0);
  return w_ite(b, concrete(1), concrete(0));
}

BoolTerm word_nonzero(const Word& w) {
  if (w->is_concrete()) return b_lit(w->value != 0);
  if (w->is_app() && w->op == WordOp::Ite && w->args[0]->is_concrete() &&
      w->args[1]->is_concrete()) {
    bool a_nz = w->args[0]->value != 0, b_nz = w->args[1]->value != 0;
    if (a_nz && !b_nz) return w->guard;
    if (!a_nz && b_nz) return b_not(w->guard);
  }
  return b_not(b_eq(w, concrete(0)));
}

BoolTerm word_iszero(const Word& w) { return b_not(word_nonzero(w)); }

namespace {

struct SimplifyCache {
  std::unordered_map<const WordNode*, Word> words;
  std::unordered_map<const BoolNode*, BoolTerm> bools;
};

Word simplify_impl(const Word& w, SimplifyCache& cache);
BoolTerm simplify_impl(const BoolTerm& b, SimplifyCache& cache);

Word rebuild(WordOp op, const std::vector<Word>& a, const BoolTerm& guard) {
  switch (op) {
    case WordOp::Add: return w_add(a[0], a[1]);
    case WordOp::Sub: return w_sub(a[0], a[1]);
    case WordOp::Mul: return w_mul(a[0], a[1]);
    case WordOp::Div: return w_div(a[0], a[1]);
    case WordOp::SDiv: return w_sdiv(a[0], a[1]);
    case WordOp::Mod: return w_mod(a[0], a[1]);
    case WordOp::SMod: return w_smod(a[0], a[1]);
    case WordOp::AddMod: return w_addmod(a[0], a[1], a[2]);
    case WordOp::MulMod: return w_mulmod(a[0], a[1], a[2]);
    case WordOp::Exp: return w_exp(a[0], a[1]);
    case WordOp::SignExtend: return w_signextend(a[0], a[1]);
    case WordOp::And: return w_and(a[0], a[1]);
    case WordOp::Or: return w_or(a[0], a[1]);
    case WordOp::Xor: return w_xor(a[0], a[1]);
    case WordOp::Not: return w_not(a[0]);
    case WordOp::Byte: return w_byte(a[0], a[1]);
    case WordOp::Shl: return w_shl(a[0], a[1]);
    case WordOp::Shr: return w_shr(a[0], a[1]);
    case WordOp::Sar: return w_sar(a[0], a[1]);
    case WordOp::Concat: return w_concat(a[0], a[1]);
    case WordOp::Ite: return w_ite(guard, a[0], a[1]);
  }
  return nullptr;
}

Word simplify_impl(const Word& w, SimplifyCache& cache) {
  if (!w->is_app()) return w;
  auto it = cache.words.find(w.get());
  if (it != cache.words.end()) return it->second;
  std::vector<Word> args;
  args.reserve(w->args.size());
  for (auto& a : w->args) args.push_back(simplify_impl(a, cache));
  BoolTerm guard = w->guard ? simplify_impl(w->guard, cache) : nullptr;
  Word r = rebuild(w->op, args, guard);
  cache.words.emplace(w.get(), r);
  return r;
}

BoolTerm simplify_impl(const BoolTerm& b, SimplifyCache& cache) {
  if (b->is_literal()) return b;
  auto it = cache.bools.find(b.get());
  if (it != cache.bools.end()) return it->second;
  BoolTerm r;
  switch (b->kind) {
    case BoolKind::Cmp:
      r = b_cmp(b->cmp, simplify_impl(b->lhs, cache), simplify_impl(b->rhs, cache));
      break;
    case BoolKind::Not:
      r = b_not(simplify_impl(b->operands[0], cache));
      break;
    case BoolKind::And:
      r = b_and(simplify_impl(b->operands[0], cache), simplify_impl(b->operands[1], cache));
      break;
    case BoolKind::Or:
      r = b_or(simplify_impl(b->operands[0], cache), simplify_impl(b->operands[1], cache));
      break;
    default:
      r = b;
  }
  cache.bools.emplace(b.get(), r);
  return r;
}

struct SubstCache {
  std::unordered_map<const WordNode*, Word> words;
  std::unordered_map<const BoolNode*, BoolTerm> bools;
};

Word subst_impl(const Word& w, const SubstitutionMap& s, SubstCache& cache) {
  auto hit = s.find(w.get());
  if (hit != s.end()) return hit->second;  // verbatim, never re-scanned
  if (!w->is_app()) return w;
  auto it = cache.words.find(w.get());
  if (it != cache.words.end()) return it->second;
  std::vector<Word> args;
  args.reserve(w->args.size());
  for (auto& a : w->args) args.push_back(subst_impl(a, s, cache));
  BoolTerm guard;
  if (w->guard) {
    BoolTerm g = substitute(w->guard, s);
    guard = g;
  }
  Word r = rebuild(w->op, args, guard);
  cache.words.emplace(w.get(), r);
  return r;
}

BoolTerm subst_impl(const BoolTerm& b, const SubstitutionMap& s, SubstCache& cache) {
  if (b->is_literal()) return b;
  auto it = cache.bools.find(b.get());
  if (it != cache.bools.end()) return it->second;
  BoolTerm r;
  switch (b->kind) {
    case BoolKind::Cmp:
      r = b_cmp(b->cmp, subst_impl(b->lhs, s, cache), subst_impl(b->rhs, s, cache));
      break;
    case BoolKind::Not:
      r = b_not(subst_impl(b->operands[0], s, cache));
      break;
    case BoolKind::And:
      r = b_and(subst_impl(b->operands[0], s, cache), subst_impl(b->operands[1], s, cache));
      break;
    case BoolKind::Or:
      r = b_or(subst_impl(b->operands[0], s, cache), subst_impl(b->operands[1], s, cache));
      break;
    default:
      r = b;
  }
  cache.bools.emplace(b.get(), r);
  return r;
}

}  // namespace

Word simplify(const Word& w) {
  SimplifyCache cache;
  return simplify_impl(w, cache);
}

BoolTerm simplify(const BoolTerm& b) {
  SimplifyCache cache;
  return simplify_impl(b, cache);
}

Word substitute(const Word& w, const SubstitutionMap& s) {
  SubstCache cache;
  return subst_impl(w, s, cache);
}

BoolTerm substitute(const BoolTerm& b, const SubstitutionMap& s) {
  SubstCache cache;
  return subst_impl(b, s, cache);
}

void collect_symbols(const Word& w, std::set<Word>& out) {
  if (w->is_symbol()) {
    out.insert(w);
    return;
  }
  if (!w->is_app()) return;
  for (auto& a : w->args) collect_symbols(a, out);
  if (w->guard) collect_symbols(w->guard, out);
}

void collect_symbols(const BoolTerm& b, std::set<Word>& out) {
  switch (b->kind) {
    case BoolKind::Cmp:
      collect_symbols(b->lhs, out);
      collect_symbols(b->rhs, out);
      break;
    case BoolKind::Not:
    case BoolKind::And:
    case BoolKind::Or:
      for (auto& o : b->operands) collect_symbols(o, out);
      break;
    default:
      break;
  }
}

const char* op_name(WordOp op) {
  switch (op) {
    case WordOp::Add: return "add";
    case WordOp::Sub: return "sub";
    case WordOp::Mul: return "mul";
    case WordOp::Div: return "div";
    case WordOp::SDiv: return "sdiv";
    case WordOp::Mod: return "mod";
    case WordOp::SMod: return "smod";
    case WordOp::AddMod: return "addmod";
    case WordOp::MulMod: return "mulmod";
    case WordOp::Exp: return "exp";
    case WordOp::SignExtend: return "signextend";
    case WordOp::And: return "and";
    case WordOp::Or: return "or";
    case WordOp::Xor: return "xor";
    case WordOp::Not: return "not";
    case WordOp::Byte: return "byte";
    case WordOp::Shl: return "shl";
    case WordOp::Shr: return "shr";
    case WordOp::Sar: return "sar";
    case WordOp::Concat: return "concat";
    case WordOp::Ite: return "ite";
  }
  return "?";
}

const char* cmp_name(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Lt: return "<";
    case CmpOp::Gt: return ">";
    case CmpOp::Slt: return "<s";
    case CmpOp::Sgt: return ">s";
  }
  return "?";
}

std::string to_string(const Word& w) {
  switch (w->kind) {
    case WordKind::Concrete:
      return "0x" + to_hex(w->value);
    case WordKind::Symbol:
      return w->name;
    case WordKind::App: {
      std::ostringstream os;
      os << "(" << op_name(w->op);
      if (w->guard) os << " " << to_string(w->guard);
      for (auto& a : w->args) os << " " << to_string(a);
      os << ")";
      return os.str();
    }
  }
  return "?";
}

std::string to_string(const BoolTerm& b) {
  switch (b->kind) {
    case BoolKind::True: return "true";
    case BoolKind::False: return "false";
    case BoolKind::Cmp: {
      std::ostringstream os;
      os << "(" << cmp_name(b->cmp) << " " << to_string(b->lhs) << " " << to_string(b->rhs) << ")";
      return os.str();
    }
    case BoolKind::Not:
      return "(not " + to_string(b->operands[0]) + ")";
    case BoolKind::And:
      return "(and " + to_string(b->operands[0]) + " " + to_string(b->operands[1]) + ")";
    case BoolKind::Or:
      return "(or " + to_string(b->operands[0]) + " " + to_string(b->operands[1]) + ")";
  }
  return "?";
}

}  // namespace annotary::evm
