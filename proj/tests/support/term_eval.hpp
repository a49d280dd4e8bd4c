#pragma once

// Reference interpreter for terms, written directly from the yellow-paper
// arithmetic definitions. Kept independent of the smart-constructor folding
// so the two can be checked against each other.

#include <map>
#include <stdexcept>
#include <string>

#include "annotary/evm/term.hpp"

namespace annotary::testing {

using annotary::evm::u256;
using annotary::evm::u512;
using annotary::evm::s512;

using Env = std::map<std::string, u256>;

inline u256 eval_word(const annotary::evm::Word& w, const Env& env);

inline bool eval_bool(const annotary::evm::BoolTerm& b, const Env& env) {
  using namespace annotary::evm;
  switch (b->kind) {
    case BoolKind::True: return true;
    case BoolKind::False: return false;
    case BoolKind::Not: return !eval_bool(b->operands[0], env);
    case BoolKind::And: return eval_bool(b->operands[0], env) && eval_bool(b->operands[1], env);
    case BoolKind::Or: return eval_bool(b->operands[0], env) || eval_bool(b->operands[1], env);
    case BoolKind::Cmp: {
      u256 l = eval_word(b->lhs, env), r = eval_word(b->rhs, env);
      switch (b->cmp) {
        case CmpOp::Eq: return l == r;
        case CmpOp::Lt: return l < r;
        case CmpOp::Gt: return l > r;
        case CmpOp::Slt: return to_signed(l) < to_signed(r);
        case CmpOp::Sgt: return to_signed(l) > to_signed(r);
      }
    }
  }
  throw std::logic_error("eval_bool: bad node");
}

inline u256 eval_word(const annotary::evm::Word& w, const Env& env) {
  using namespace annotary::evm;
  if (w->is_concrete()) return w->value;
  if (w->is_symbol()) {
    auto it = env.find(w->name);
    if (it == env.end()) throw std::runtime_error("unbound symbol " + w->name);
    return it->second;
  }
  auto a = [&](size_t i) { return eval_word(w->args[i], env); };
  switch (w->op) {
    case WordOp::Add: return a(0) + a(1);
    case WordOp::Sub: return a(0) - a(1);
    case WordOp::Mul: return a(0) * a(1);
    case WordOp::Div: { u256 d = a(1); return d == 0 ? u256(0) : a(0) / d; }
    case WordOp::SDiv: {
      s512 n = to_signed(a(0)), d = to_signed(a(1));
      if (d == 0) return 0;
      return from_signed(n / d);
    }
    case WordOp::Mod: { u256 d = a(1); return d == 0 ? u256(0) : a(0) % d; }
    case WordOp::SMod: {
      s512 n = to_signed(a(0)), d = to_signed(a(1));
      if (d == 0) return 0;
      return from_signed(n % d);
    }
    case WordOp::AddMod: {
      u256 m = a(2);
      if (m == 0) return 0;
      return u256((u512(a(0)) + u512(a(1))) % u512(m));
    }
    case WordOp::MulMod: {
      u256 m = a(2);
      if (m == 0) return 0;
      return u256((u512(a(0)) * u512(a(1))) % u512(m));
    }
    case WordOp::Exp: {
      u256 base = a(0), exp = a(1), acc = 1;
      while (exp != 0) {
        if (boost::multiprecision::bit_test(exp, 0)) acc *= base;
        base *= base;
        exp >>= 1;
      }
      return acc;
    }
    case WordOp::SignExtend: {
      u256 idx = a(0), v = a(1);
      if (idx > 30) return v;
      unsigned bit = static_cast<unsigned>(idx) * 8 + 7;
      u256 mask = (u256(1) << (bit + 1)) - 1;
      if (boost::multiprecision::bit_test(v, bit)) return v | ~mask;
      return v & mask;
    }
    case WordOp::And: return a(0) & a(1);
    case WordOp::Or: return a(0) | a(1);
    case WordOp::Xor: return a(0) ^ a(1);
    case WordOp::Not: return ~a(0);
    case WordOp::Byte: {
      u256 idx = a(0);
      if (idx > 31) return 0;
      return (a(1) >> (8 * (31 - static_cast<unsigned>(idx)))) & 0xff;
    }
    case WordOp::Shl: { u256 s = a(0); return s > 255 ? u256(0) : a(1) << static_cast<unsigned>(s); }
    case WordOp::Shr: { u256 s = a(0); return s > 255 ? u256(0) : a(1) >> static_cast<unsigned>(s); }
    case WordOp::Sar: {
      u256 s = a(0), v = a(1);
      bool neg = is_negative(v);
      if (s > 255) return neg ? u256_max() : u256(0);
      unsigned sh = static_cast<unsigned>(s);
      u256 r = v >> sh;
      if (neg && sh > 0) r |= ~(u256_max() >> sh);
      return r;
    }
    case WordOp::Ite: return eval_bool(w->guard, env) ? a(0) : a(1);
    case WordOp::Concat: throw std::runtime_error("Concat has no word value");
  }
  throw std::logic_error("eval_word: bad node");
}

}  // namespace annotary::testing
