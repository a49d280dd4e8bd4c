#include "annotary/solver/smtlib.hpp"

#include <set>
#include <sstream>

namespace annotary::solver {

using namespace annotary::evm;

namespace {

std::string bv_const(const u256& v) { return "#x" + to_hex_full(v); }

std::string quote_symbol(const std::string& name) { return "|" + name + "|"; }

std::string ext512(const std::string& e) { return "((_ zero_extend 256) " + e + ")"; }

// Square-and-multiply for concrete exponents, with lets to keep the
// script linear in the exponent's bit length.
std::string pow_expr(const std::string& base, const u256& exp) {
  if (exp == 0) return bv_const(1);
  unsigned highest = boost::multiprecision::msb(exp);
  std::ostringstream os;
  for (unsigned i = 0; i <= highest; ++i) {
    os << "(let ((p" << i << " "
       << (i == 0 ? base : "(bvmul p" + std::to_string(i - 1) + " p" + std::to_string(i - 1) + ")")
       << ")) ";
  }
  std::string acc;
  for (unsigned i = 0; i <= highest; ++i) {
    if (!boost::multiprecision::bit_test(exp, i)) continue;
    std::string p = "p" + std::to_string(i);
    acc = acc.empty() ? p : "(bvmul " + acc + " " + p + ")";
  }
  os << acc;
  for (unsigned i = 0; i <= highest; ++i) os << ")";
  return os.str();
}

}  // namespace

std::string to_smtlib(const Word& w) {
  switch (w->kind) {
    case WordKind::Concrete:
      return bv_const(w->value);
    case WordKind::Symbol:
      return quote_symbol(w->name);
    case WordKind::App:
      break;
  }
  auto a = [&](size_t i) { return to_smtlib(w->args[i]); };
  switch (w->op) {
    case WordOp::Add: return "(bvadd " + a(0) + " " + a(1) + ")";
    case WordOp::Sub: return "(bvsub " + a(0) + " " + a(1) + ")";
    case WordOp::Mul: return "(bvmul " + a(0) + " " + a(1) + ")";
    case WordOp::Div:
      return "(ite (= " + a(1) + " " + bv_const(0) + ") " + bv_const(0) +
             " (bvudiv " + a(0) + " " + a(1) + "))";
    case WordOp::SDiv:
      return "(ite (= " + a(1) + " " + bv_const(0) + ") " + bv_const(0) +
             " (bvsdiv " + a(0) + " " + a(1) + "))";
    case WordOp::Mod:
      return "(ite (= " + a(1) + " " + bv_const(0) + ") " + bv_const(0) +
             " (bvurem " + a(0) + " " + a(1) + "))";
    case WordOp::SMod:
      return "(ite (= " + a(1) + " " + bv_const(0) + ") " + bv_const(0) +
             " (bvsrem " + a(0) + " " + a(1) + "))";
    case WordOp::AddMod:
      return "(ite (= " + a(2) + " " + bv_const(0) + ") " + bv_const(0) +
             " ((_ extract 255 0) (bvurem (bvadd " + ext512(a(0)) + " " + ext512(a(1)) +
             ") " + ext512(a(2)) + ")))";
    case WordOp::MulMod:
      return "(ite (= " + a(2) + " " + bv_const(0) + ") " + bv_const(0) +
             " ((_ extract 255 0) (bvurem (bvmul " + ext512(a(0)) + " " + ext512(a(1)) +
             ") " + ext512(a(2)) + ")))";
    case WordOp::Exp:
      if (!w->args[1]->is_concrete())
        throw SmtPrintError("symbolic exponent reached the SMT printer");
      return pow_expr(a(0), w->args[1]->value);
    case WordOp::SignExtend: {
      if (w->args[0]->is_concrete()) {
        unsigned idx = static_cast<unsigned>(w->args[0]->value & 31);
        unsigned top = idx * 8 + 7;
        return "((_ sign_extend " + std::to_string(255 - top) + ") ((_ extract " +
               std::to_string(top) + " 0) " + a(1) + "))";
      }
      // rare: fold a symbolic index into a selection chain
      std::string expr = a(1);
      for (int idx = 30; idx >= 0; --idx) {
        unsigned top = idx * 8 + 7;
        std::string ext = "((_ sign_extend " + std::to_string(255 - top) + ") ((_ extract " +
                          std::to_string(top) + " 0) " + a(1) + "))";
        expr = "(ite (= " + a(0) + " " + bv_const(u256(idx)) + ") " + ext + " " + expr + ")";
      }
      return expr;
    }
    case WordOp::And: return "(bvand " + a(0) + " " + a(1) + ")";
    case WordOp::Or: return "(bvor " + a(0) + " " + a(1) + ")";
    case WordOp::Xor: return "(bvxor " + a(0) + " " + a(1) + ")";
    case WordOp::Not: return "(bvnot " + a(0) + ")";
    case WordOp::Byte:
      return "(ite (bvuge " + a(0) + " " + bv_const(32) + ") " + bv_const(0) +
             " (bvand (bvlshr " + a(1) + " (bvmul (bvsub " + bv_const(31) + " " + a(0) +
             ") " + bv_const(8) + ")) " + bv_const(0xff) + "))";
    case WordOp::Shl: return "(bvshl " + a(1) + " " + a(0) + ")";
    case WordOp::Shr: return "(bvlshr " + a(1) + " " + a(0) + ")";
    case WordOp::Sar: return "(bvashr " + a(1) + " " + a(0) + ")";
    case WordOp::Concat:
      throw SmtPrintError("keccak derivation term reached the SMT printer");
    case WordOp::Ite:
      return "(ite " + to_smtlib(w->guard) + " " + a(0) + " " + a(1) + ")";
  }
  throw SmtPrintError("unhandled word op");
}

std::string to_smtlib(const BoolTerm& b) {
  switch (b->kind) {
    case BoolKind::True: return "true";
    case BoolKind::False: return "false";
    case BoolKind::Cmp: {
      std::string l = to_smtlib(b->lhs), r = to_smtlib(b->rhs);
      switch (b->cmp) {
        case CmpOp::Eq: return "(= " + l + " " + r + ")";
        case CmpOp::Lt: return "(bvult " + l + " " + r + ")";
        case CmpOp::Gt: return "(bvugt " + l + " " + r + ")";
        case CmpOp::Slt: return "(bvslt " + l + " " + r + ")";
        case CmpOp::Sgt: return "(bvsgt " + l + " " + r + ")";
      }
      break;
    }
    case BoolKind::Not: return "(not " + to_smtlib(b->operands[0]) + ")";
    case BoolKind::And:
      return "(and " + to_smtlib(b->operands[0]) + " " + to_smtlib(b->operands[1]) + ")";
    case BoolKind::Or:
      return "(or " + to_smtlib(b->operands[0]) + " " + to_smtlib(b->operands[1]) + ")";
  }
  throw SmtPrintError("unhandled bool kind");
}

std::string build_script(const std::vector<BoolTerm>& constraints, unsigned timeout_ms) {
  std::set<Word> symbols;
  for (const auto& c : constraints) collect_symbols(c, symbols);

  std::ostringstream os;
  os << "(set-option :timeout " << timeout_ms << ")\n";
  // Deterministic effort bound; the wasm build cannot rely on wall-clock
  // interruption, rlimit makes Unknown reproducible.
  os << "(set-option :rlimit " << (static_cast<uint64_t>(timeout_ms) * 5000) << ")\n";
  os << "(set-option :model true)\n";
  for (const auto& s : symbols)
    os << "(declare-const " << quote_symbol(s->name) << " (_ BitVec 256))\n";
  for (const auto& c : constraints) os << "(assert " << to_smtlib(c) << ")\n";
  os << "(check-sat)\n(get-model)\n";
  return os.str();
}

}  // namespace annotary::solver
