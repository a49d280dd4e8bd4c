#pragma once

// Minimal concrete EVM used as an oracle: executes the same bytecode the
// symbolic engine sees, with plain 256-bit values. Written directly from
// the instruction definitions, independent of the symbolic interpreter.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "annotary/evm/instruction.hpp"
#include "annotary/evm/keccak.hpp"
#include "annotary/evm/u256.hpp"

namespace annotary::testing {

using annotary::evm::u256;
using annotary::evm::u512;
using annotary::evm::s512;

struct ConcreteEnv {
  std::vector<uint8_t> calldata;
  u256 caller = 0xc0ffee;
  u256 origin = 0xc0ffee;
  u256 callvalue = 0;
  u256 self = 0xdead;
  u256 block_number = 1;
  u256 timestamp = 1;
  std::map<u256, u256> storage;
};

struct ConcreteResult {
  enum class Halt { Stop, Return, Revert, Invalid, OutOfBudget } halt = Halt::Stop;
  std::vector<u256> stack;
  std::map<u256, u256> storage;
  std::vector<uint8_t> return_data;
};

class ConcreteVM {
 public:
  ConcreteVM(std::vector<uint8_t> code, ConcreteEnv env)
      : code_(std::move(code)), env_(std::move(env)) {
    instructions_ = annotary::evm::decode(code_);
    for (size_t i = 0; i < instructions_.size(); ++i) {
      index_[instructions_[i].offset] = i;
      if (instructions_[i].opcode == annotary::evm::Opcode::JUMPDEST)
        jumpdests_.insert(instructions_[i].offset);
    }
  }

  ConcreteResult run(size_t max_steps = 100000) {
    using annotary::evm::Opcode;
    ConcreteResult res;
    res.storage = env_.storage;
    std::vector<u256>& st = res.stack;
    std::map<uint64_t, uint8_t> mem;
    uint32_t pc = 0;

    auto mem_word = [&](uint64_t off) {
      u256 v = 0;
      for (int i = 0; i < 32; ++i) v = (v << 8) | mem[off + i];
      return v;
    };
    auto mem_store = [&](uint64_t off, const u256& v) {
      for (int i = 0; i < 32; ++i)
        mem[off + i] = static_cast<uint8_t>((v >> (8 * (31 - i))) & 0xff);
    };
    auto cd_word = [&](uint64_t off) {
      u256 v = 0;
      for (int i = 0; i < 32; ++i) {
        uint8_t b = off + i < env_.calldata.size() ? env_.calldata[off + i] : 0;
        v = (v << 8) | b;
      }
      return v;
    };
    auto pop = [&]() {
      if (st.empty()) throw std::runtime_error("concrete vm underflow");
      u256 v = st.back();
      st.pop_back();
      return v;
    };

    for (size_t steps = 0; steps < max_steps; ++steps) {
      auto it = index_.find(pc);
      if (it == index_.end()) { res.halt = ConcreteResult::Halt::Stop; return res; }
      const auto& ins = instructions_[it->second];
      if (!ins.valid) { res.halt = ConcreteResult::Halt::Invalid; return res; }
      uint32_t next = ins.offset + 1 + static_cast<uint32_t>(ins.immediate.size());
      uint8_t raw = static_cast<uint8_t>(ins.opcode);

      switch (ins.opcode) {
        case Opcode::STOP: res.halt = ConcreteResult::Halt::Stop; return res;
        case Opcode::ADD: { u256 a = pop(), b = pop(); st.push_back(a + b); break; }
        case Opcode::MUL: { u256 a = pop(), b = pop(); st.push_back(a * b); break; }
        case Opcode::SUB: { u256 a = pop(), b = pop(); st.push_back(a - b); break; }
        case Opcode::DIV: { u256 a = pop(), b = pop(); st.push_back(b == 0 ? u256(0) : a / b); break; }
        case Opcode::SDIV: {
          u256 a = pop(), b = pop();
          st.push_back(b == 0 ? u256(0)
                              : annotary::evm::from_signed(annotary::evm::to_signed(a) /
                                                           annotary::evm::to_signed(b)));
          break;
        }
        case Opcode::MOD: { u256 a = pop(), b = pop(); st.push_back(b == 0 ? u256(0) : a % b); break; }
        case Opcode::SMOD: {
          u256 a = pop(), b = pop();
          st.push_back(b == 0 ? u256(0)
                              : annotary::evm::from_signed(annotary::evm::to_signed(a) %
                                                           annotary::evm::to_signed(b)));
          break;
        }
        case Opcode::ADDMOD: {
          u256 a = pop(), b = pop(), m = pop();
          st.push_back(m == 0 ? u256(0) : u256((u512(a) + u512(b)) % u512(m)));
          break;
        }
        case Opcode::MULMOD: {
          u256 a = pop(), b = pop(), m = pop();
          st.push_back(m == 0 ? u256(0) : u256((u512(a) * u512(b)) % u512(m)));
          break;
        }
        case Opcode::EXP: {
          u256 base = pop(), exp = pop(), acc = 1;
          while (exp != 0) {
            if (boost::multiprecision::bit_test(exp, 0)) acc *= base;
            base *= base;
            exp >>= 1;
          }
          st.push_back(acc);
          break;
        }
        case Opcode::SIGNEXTEND: {
          u256 idx = pop(), v = pop();
          if (idx > 30) { st.push_back(v); break; }
          unsigned bit = static_cast<unsigned>(idx) * 8 + 7;
          u256 mask = (u256(1) << (bit + 1)) - 1;
          st.push_back(boost::multiprecision::bit_test(v, bit) ? (v | ~mask) : (v & mask));
          break;
        }
        case Opcode::LT: { u256 a = pop(), b = pop(); st.push_back(a < b ? 1 : 0); break; }
        case Opcode::GT: { u256 a = pop(), b = pop(); st.push_back(a > b ? 1 : 0); break; }
        case Opcode::SLT: {
          u256 a = pop(), b = pop();
          st.push_back(annotary::evm::to_signed(a) < annotary::evm::to_signed(b) ? 1 : 0);
          break;
        }
        case Opcode::SGT: {
          u256 a = pop(), b = pop();
          st.push_back(annotary::evm::to_signed(a) > annotary::evm::to_signed(b) ? 1 : 0);
          break;
        }
        case Opcode::EQ: { u256 a = pop(), b = pop(); st.push_back(a == b ? 1 : 0); break; }
        case Opcode::ISZERO: { st.push_back(pop() == 0 ? 1 : 0); break; }
        case Opcode::AND: { u256 a = pop(), b = pop(); st.push_back(a & b); break; }
        case Opcode::OR: { u256 a = pop(), b = pop(); st.push_back(a | b); break; }
        case Opcode::XOR: { u256 a = pop(), b = pop(); st.push_back(a ^ b); break; }
        case Opcode::NOT: { st.push_back(~pop()); break; }
        case Opcode::BYTE: {
          u256 i = pop(), x = pop();
          st.push_back(i > 31 ? u256(0) : (x >> (8 * (31 - static_cast<unsigned>(i)))) & 0xff);
          break;
        }
        case Opcode::SHL: { u256 sft = pop(), v = pop(); st.push_back(sft > 255 ? u256(0) : v << static_cast<unsigned>(sft)); break; }
        case Opcode::SHR: { u256 sft = pop(), v = pop(); st.push_back(sft > 255 ? u256(0) : v >> static_cast<unsigned>(sft)); break; }
        case Opcode::SAR: {
          u256 sft = pop(), v = pop();
          bool neg = annotary::evm::is_negative(v);
          if (sft > 255) { st.push_back(neg ? annotary::evm::u256_max() : u256(0)); break; }
          unsigned sh = static_cast<unsigned>(sft);
          u256 r = v >> sh;
          if (neg && sh > 0) r |= ~(annotary::evm::u256_max() >> sh);
          st.push_back(r);
          break;
        }
        case Opcode::SHA3: {
          u256 off = pop(), len = pop();
          std::vector<uint8_t> data;
          for (u256 i = 0; i < len; ++i)
            data.push_back(mem[static_cast<uint64_t>(off + i)]);
          st.push_back(annotary::evm::keccak256_word(data));
          break;
        }
        case Opcode::ADDRESS: st.push_back(env_.self); break;
        case Opcode::ORIGIN: st.push_back(env_.origin); break;
        case Opcode::CALLER: st.push_back(env_.caller); break;
        case Opcode::CALLVALUE: st.push_back(env_.callvalue); break;
        case Opcode::CALLDATALOAD: st.push_back(cd_word(static_cast<uint64_t>(pop()))); break;
        case Opcode::CALLDATASIZE: st.push_back(u256(env_.calldata.size())); break;
        case Opcode::NUMBER: st.push_back(env_.block_number); break;
        case Opcode::TIMESTAMP: st.push_back(env_.timestamp); break;
        case Opcode::POP: pop(); break;
        case Opcode::MLOAD: st.push_back(mem_word(static_cast<uint64_t>(pop()))); break;
        case Opcode::MSTORE: { u256 off = pop(), v = pop(); mem_store(static_cast<uint64_t>(off), v); break; }
        case Opcode::MSTORE8: { u256 off = pop(), v = pop(); mem[static_cast<uint64_t>(off)] = static_cast<uint8_t>(v & 0xff); break; }
        case Opcode::SLOAD: {
          u256 k = pop();
          auto f = res.storage.find(k);
          st.push_back(f == res.storage.end() ? u256(0) : f->second);
          break;
        }
        case Opcode::SSTORE: { u256 k = pop(), v = pop(); res.storage[k] = v; break; }
        case Opcode::JUMP: {
          u256 t = pop();
          if (!jumpdests_.count(static_cast<uint32_t>(t))) { res.halt = ConcreteResult::Halt::Invalid; return res; }
          pc = static_cast<uint32_t>(t);
          continue;
        }
        case Opcode::JUMPI: {
          u256 t = pop(), cnd = pop();
          if (cnd != 0) {
            if (!jumpdests_.count(static_cast<uint32_t>(t))) { res.halt = ConcreteResult::Halt::Invalid; return res; }
            pc = static_cast<uint32_t>(t);
            continue;
          }
          break;
        }
        case Opcode::PC: st.push_back(ins.offset); break;
        case Opcode::JUMPDEST: break;
        case Opcode::RETURN:
        case Opcode::REVERT: {
          u256 off = pop(), len = pop();
          for (u256 i = 0; i < len; ++i)
            res.return_data.push_back(mem[static_cast<uint64_t>(off + i)]);
          res.halt = ins.opcode == Opcode::RETURN ? ConcreteResult::Halt::Return
                                                  : ConcreteResult::Halt::Revert;
          return res;
        }
        case Opcode::INVALID: res.halt = ConcreteResult::Halt::Invalid; return res;
        default:
          if (raw >= 0x60 && raw <= 0x7f) {
            st.push_back(annotary::evm::bytes_to_word(ins.immediate.data(), ins.immediate.size()));
          } else if (raw >= 0x80 && raw <= 0x8f) {
            unsigned n = raw - 0x7f;
            if (st.size() < n) throw std::runtime_error("concrete vm underflow");
            st.push_back(st[st.size() - n]);
          } else if (raw >= 0x90 && raw <= 0x9f) {
            unsigned n = raw - 0x8f;
            if (st.size() < n + 1) throw std::runtime_error("concrete vm underflow");
            std::swap(st[st.size() - 1], st[st.size() - 1 - n]);
          } else {
            res.halt = ConcreteResult::Halt::Invalid;
            return res;
          }
      }
      pc = next;
    }
    res.halt = ConcreteResult::Halt::OutOfBudget;
    return res;
  }

 private:
  std::vector<uint8_t> code_;
  ConcreteEnv env_;
  std::vector<annotary::evm::Instruction> instructions_;
  std::map<uint32_t, size_t> index_;
  std::set<uint32_t> jumpdests_;
};

}  // namespace annotary::testing
