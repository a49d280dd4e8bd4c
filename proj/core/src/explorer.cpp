#include "annotary/symexec/explorer.hpp"

#include <algorithm>

#include "annotary/evm/keccak.hpp"

namespace annotary::symexec {

using namespace annotary::evm;
using solver::Provenance;

namespace {

Word get_tracked(const KeccakMap& m, const Word& w) {
  auto it = m.find(w);
  return it == m.end() ? w : it->second;
}

}  // namespace

void keccak_track_add(const Word& o1, const Word& o2, KeccakMap& m) {
  if (!m.count(o1) && !m.count(o2)) return;
  m[w_add(o1, o2)] = w_add(get_tracked(m, o1), get_tracked(m, o2));
}

void keccak_track_sha3(const std::vector<Word>& input_words, const Word& result,
                       KeccakMap& m) {
  if (input_words.empty()) return;
  Word der;
  for (const Word& w : input_words) {
    Word piece = get_tracked(m, w);
    der = der ? w_concat(der, piece) : piece;
  }
  m[result] = der;
}

Explorer::Explorer(solver::Solver& solver, ExplorationBounds bounds)
    : solver_(solver), bounds_(bounds) {}

namespace {

// The compiler appends a length-prefixed CBOR metadata blob (0xa1 "bzzr0"
// ...) after the executable code. It is data, not code, so it is excluded
// from the instruction census used for coverage.
size_t executable_end(const std::vector<uint8_t>& bytes) {
  size_t n = bytes.size();
  if (n < 2) return n;
  size_t meta = (static_cast<size_t>(bytes[n - 2]) << 8) | bytes[n - 1];
  if (meta + 2 <= n && bytes[n - meta - 2] == 0xa1) return n - meta - 2;
  return n;
}

}  // namespace

CodeRef Explorer::register_code(std::vector<uint8_t> bytes, std::string label) {
  CodeRef code = CodeObject::make(std::move(bytes), std::move(label), next_code_id_++);
  size_t end = executable_end(code->bytes);
  auto& offsets = code_offsets_[code->id];
  for (const auto& ins : code->instructions)
    if (ins.offset < end) offsets.insert(ins.offset);
  return code;
}

double StateSpace::coverage(uint64_t code_id) const {
  auto it = instruction_offsets.find(code_id);
  if (it == instruction_offsets.end() || it->second.empty()) return 0.0;
  size_t hit = 0;
  for (uint32_t off : it->second)
    if (visited.count({code_id, off})) ++hit;
  return static_cast<double>(hit) / static_cast<double>(it->second.size());
}

bool Explorer::feasible(const GlobalState& s, const BoolTerm& extra) {
  if (extra->is_false()) return false;
  auto terms = s.constraints.terms();
  if (!extra->is_true()) terms.push_back(extra);
  return !solver_.check(terms).is_unsat();
}

Word Explorer::balance_of(GlobalState& s, const Word& address) {
  Word a = simplify(address);
  if (a->is_concrete()) return s.account(a->value).balance;
  return s.fresh_symbol("balance_at", SymOrigin::Balance);
}

// --- stack helpers; underflow/overflow end the path, never the analysis ---

namespace {

bool pop1(GlobalState& s, Word& a) {
  auto& st = s.machine().stack;
  if (st.empty()) {
    s.halt(TerminalKind::Invalid, "stack underflow");
    return false;
  }
  a = st.back();
  st.pop_back();
  return true;
}

bool popn(GlobalState& s, std::initializer_list<Word*> outs) {
  for (Word* w : outs)
    if (!pop1(s, *w)) return false;
  return true;
}

bool push(GlobalState& s, Word w) {
  auto& st = s.machine().stack;
  if (st.size() >= kMaxStackDepth) {
    s.halt(TerminalKind::Invalid, "stack overflow");
    return false;
  }
  st.push_back(std::move(w));
  return true;
}

// Concrete narrowing for memory offsets and sizes.
bool as_u64(GlobalState& s, const Word& w, const char* what, uint64_t& out) {
  Word v = simplify(w);
  if (!v->is_concrete() || v->value > u256(1) << 32) {
    s.warnings.push_back(std::string("non-concrete or oversized ") + what +
                         "; path dropped");
    s.halt(TerminalKind::Invalid, std::string("unsupported ") + what);
    return false;
  }
  out = static_cast<uint64_t>(v->value);
  return true;
}

void advance(GlobalState& s, const Instruction& ins) {
  s.machine().pc = ins.offset + 1 + static_cast<uint32_t>(ins.immediate.size());
}

}  // namespace

void Explorer::return_from_frame(GlobalState& s) {
  TerminalKind kind = *s.terminal;
  s.terminal.reset();
  s.halt_reason.clear();
  Frame done = std::move(s.frames.back());
  s.frames.pop_back();
  std::vector<MemByte> output = std::move(s.return_data);
  s.return_data.clear();

  bool success = kind != TerminalKind::Revert;
  if (!success) s.world = std::move(done.world_snapshot);

  if (done.kind == CallKind::Create) {
    if (success) {
      auto bytes = as_concrete_bytes(output);
      if (bytes) {
        s.account(done.create_address).code =
            register_code(*bytes, "created@" + to_hex(done.create_address));
      } else if (!output.empty()) {
        s.warnings.push_back("created code has symbolic bytes; account left code-less");
      }
      push(s, concrete(done.create_address));
    } else {
      push(s, concrete(0));
    }
    s.machine().returndata.clear();
    return;
  }

  // message-call family: copy output into the caller's out region
  s.machine().returndata = output;
  uint64_t n = std::min<uint64_t>(done.ret_len, output.size());
  for (uint64_t i = 0; i < n; ++i)
    s.machine().memory.store_byte(done.ret_offset + i, output[i]);
  if (done.ret_len > 0) s.machine().memory.touch(done.ret_offset, done.ret_len);
  push(s, concrete(success ? 1 : 0));
}

void Explorer::handle_call(GlobalState& s, CallKind kind, uint32_t site_offset) {
  Word gas, to, value, in_off_w, in_len_w, out_off_w, out_len_w;
  if (kind == CallKind::Create) {
    if (!popn(s, {&value, &in_off_w, &in_len_w})) return;
  } else if (kind == CallKind::Call || kind == CallKind::CallCode) {
    if (!popn(s, {&gas, &to, &value, &in_off_w, &in_len_w, &out_off_w, &out_len_w})) return;
  } else {
    if (!popn(s, {&gas, &to, &in_off_w, &in_len_w, &out_off_w, &out_len_w})) return;
    value = concrete(0);
  }

  if (s.call_depth() + 1 > bounds_.max_call_depth) {
    s.warnings.push_back("call depth bound reached");
    push(s, concrete(0));
    return;
  }

  const u256 addr_mask = (u256(1) << 160) - 1;

  if (kind == CallKind::Create) {
    uint64_t off = 0, len = 0;
    if (!as_u64(s, in_off_w, "CREATE code offset", off)) return;
    if (!as_u64(s, in_len_w, "CREATE code length", len)) return;
    auto init_bytes = as_concrete_bytes(s.machine().memory.read_range(off, len));
    if (!init_bytes) {
      s.warnings.push_back("symbolic creation code; CREATE result widened");
      push(s, s.fresh_symbol("create_ret", SymOrigin::CallReturn));
      return;
    }
    // deterministic pseudo-address derived from creator and per-path nonce
    std::vector<uint8_t> seed(32 + 8);
    word_to_bytes(s.env().active_account, seed.data());
    for (int i = 0; i < 8; ++i)
      seed[32 + i] = static_cast<uint8_t>(s.create_counter >> (8 * (7 - i)));
    ++s.create_counter;
    u256 new_addr = keccak256_word(seed) & addr_mask;

    Frame f;
    f.kind = CallKind::Create;
    f.world_snapshot = s.world;
    f.create_address = new_addr;
    AccountState& created = s.account(new_addr);
    created.storage = evm::StorageMap{};
    created.storage.mode = StorageMode::ConcreteDefaultZero;

    f.env.active_account = new_addr;
    f.env.storage_account = new_addr;
    f.env.sender = concrete(s.env().active_account);
    f.env.origin = s.env().origin;
    f.env.callvalue = value;
    f.env.code = register_code(*init_bytes, "create@" + to_hex(new_addr));
    f.env.calldata.symbolic = false;
    f.env.calldata.instance_tag = s.tx_meta.instance_tag;
    f.env.block = s.env().block;
    f.env.is_static = s.env().is_static;
    f.env.is_creation = true;
    s.frames.push_back(std::move(f));
    return;
  }

  Word to_s = simplify(to);
  CodeRef callee_code;
  u256 to_addr = 0;
  bool resolved = false;
  if (to_s->is_concrete()) {
    to_addr = to_s->value & addr_mask;
    auto it = s.world.find(to_addr);
    if (it != s.world.end() && it->second.code && !it->second.code->bytes.empty()) {
      callee_code = it->second.code;
      resolved = true;
    } else if (resolver_) {
      callee_code = resolver_(to_addr);
      if (callee_code && !callee_code->bytes.empty()) {
        s.account(to_addr).code = callee_code;
        resolved = true;
      }
    }
  }

  uint64_t out_off = 0, out_len = 0;
  {
    Word oo = simplify(out_off_w), ol = simplify(out_len_w);
    if (oo->is_concrete() && ol->is_concrete() && ol->value < (u256(1) << 32)) {
      out_off = static_cast<uint64_t>(oo->value);
      out_len = static_cast<uint64_t>(ol->value);
    } else {
      s.warnings.push_back("symbolic call output region; ignored");
    }
  }

  if (!resolved) {
    // balance movement stays on sigma even when the code is opaque
    if ((kind == CallKind::Call || kind == CallKind::CallCode) &&
        !value->is_concrete(0)) {
      AccountState& caller = s.account(s.env().active_account);
      caller.balance = w_sub(caller.balance, value);
      if (to_s->is_concrete()) {
        AccountState& callee = s.account(to_addr);
        callee.balance = w_add(callee.balance, value);
      }
    }
    if (kind == CallKind::DelegateCall || kind == CallKind::CallCode) {
      // unknown code ran with write access to our storage: every slot of the
      // active storage account becomes a renamed unknown
      u256 target = s.env().storage_account;
      s.storage_generation[target] += 1;
      AccountState& acct = s.account(target);
      acct.storage = evm::StorageMap{};
      acct.storage.mode = StorageMode::Symbolic;
      s.delegate_resets.push_back({target, s.env().code->id, site_offset});
      s.warnings.push_back("unresolvable delegate target; storage of account 0x" +
                           to_hex(target) + " reset to fresh symbols");
    }
    s.machine().returndata.clear();
    push(s, s.fresh_symbol("call_ret", SymOrigin::CallReturn));
    return;
  }

  uint64_t in_off = 0, in_len = 0;
  std::vector<MemByte> payload;
  {
    Word io = simplify(in_off_w), il = simplify(in_len_w);
    if (io->is_concrete() && il->is_concrete() && il->value < (u256(1) << 32)) {
      in_off = static_cast<uint64_t>(io->value);
      in_len = static_cast<uint64_t>(il->value);
      payload = s.machine().memory.read_range(in_off, in_len);
    } else {
      s.warnings.push_back("symbolic call input region; callee sees empty calldata");
    }
  }

  Frame f;
  f.kind = kind;
  f.world_snapshot = s.world;
  f.ret_offset = out_off;
  f.ret_len = out_len;

  f.env = s.env();  // inherit, then specialize
  f.env.code = callee_code;
  f.env.is_creation = false;
  f.env.creation_args_len = 0;
  f.env.calldata = evm::CalldataBuffer{};
  f.env.calldata.symbolic = false;
  f.env.calldata.instance_tag = s.tx_meta.instance_tag;
  f.env.calldata.buffer = std::move(payload);

  switch (kind) {
    case CallKind::Call:
      f.env.active_account = to_addr;
      f.env.storage_account = to_addr;
      f.env.sender = concrete(s.env().active_account);
      f.env.callvalue = value;
      break;
    case CallKind::StaticCall:
      f.env.active_account = to_addr;
      f.env.storage_account = to_addr;
      f.env.sender = concrete(s.env().active_account);
      f.env.callvalue = concrete(0);
      f.env.is_static = true;
      break;
    case CallKind::CallCode:
      f.env.sender = concrete(s.env().active_account);
      f.env.callvalue = value;
      break;  // active/storage account stay the caller's
    case CallKind::DelegateCall:
      break;  // sender, callvalue, accounts all inherited
    case CallKind::Create:
      break;  // unreachable
  }

  if (kind == CallKind::Call && !value->is_concrete(0)) {
    AccountState& caller = s.account(s.env().active_account);
    caller.balance = w_sub(caller.balance, value);
    AccountState& callee = s.account(to_addr);
    callee.balance = w_add(callee.balance, value);
  }

  f.machine = MachineState{};
  s.frames.push_back(std::move(f));
}

void Explorer::exec_instruction(GlobalState& s,
                                std::vector<std::shared_ptr<GlobalState>>& out) {
  Frame& fr = s.frame();
  const CodeObject& code = *fr.env.code;
  const Instruction* insp = code.at_offset(fr.machine.pc);
  if (!insp) {
    // running off the end of code is an implicit STOP
    s.halt(TerminalKind::Stop, "end of code");
    if (s.frames.size() > 1) return_from_frame(s);
    return;
  }
  const Instruction& ins = *insp;
  if (!ins.valid) {
    s.invalid_code_id = code.id;
    s.invalid_pc = ins.offset;
    s.halt(TerminalKind::Invalid, "undefined instruction");
    return;
  }
  s.visited.insert({code.id, ins.offset});

  const Opcode op = ins.opcode;
  auto& stack = fr.machine.stack;

  // arity guard up front so each handler can pop freely
  if (stack.size() < stack_pops(op)) {
    s.halt(TerminalKind::Invalid, "stack underflow");
    return;
  }
  if (stack.size() - stack_pops(op) + stack_pushes(op) > kMaxStackDepth) {
    s.halt(TerminalKind::Invalid, "stack overflow");
    return;
  }

  Word a, b, c;
  switch (op) {
    case Opcode::STOP:
      s.halt(TerminalKind::Stop);
      if (s.frames.size() > 1) return_from_frame(s);
      return;

    case Opcode::ADD:
      popn(s, {&a, &b});
      keccak_track_add(a, b, s.keccak_map);
      push(s, w_add(a, b));
      break;
    case Opcode::MUL: popn(s, {&a, &b}); push(s, w_mul(a, b)); break;
    case Opcode::SUB: popn(s, {&a, &b}); push(s, w_sub(a, b)); break;
    case Opcode::DIV: popn(s, {&a, &b}); push(s, w_div(a, b)); break;
    case Opcode::SDIV: popn(s, {&a, &b}); push(s, w_sdiv(a, b)); break;
    case Opcode::MOD: popn(s, {&a, &b}); push(s, w_mod(a, b)); break;
    case Opcode::SMOD: popn(s, {&a, &b}); push(s, w_smod(a, b)); break;
    case Opcode::ADDMOD: popn(s, {&a, &b, &c}); push(s, w_addmod(a, b, c)); break;
    case Opcode::MULMOD: popn(s, {&a, &b, &c}); push(s, w_mulmod(a, b, c)); break;
    case Opcode::EXP: popn(s, {&a, &b}); push(s, w_exp(a, b)); break;
    case Opcode::SIGNEXTEND: popn(s, {&a, &b}); push(s, w_signextend(a, b)); break;

    case Opcode::LT: popn(s, {&a, &b}); push(s, bool_to_word(b_ult(a, b))); break;
    case Opcode::GT: popn(s, {&a, &b}); push(s, bool_to_word(b_ugt(a, b))); break;
    case Opcode::SLT: popn(s, {&a, &b}); push(s, bool_to_word(b_slt(a, b))); break;
    case Opcode::SGT: popn(s, {&a, &b}); push(s, bool_to_word(b_sgt(a, b))); break;
    case Opcode::EQ: popn(s, {&a, &b}); push(s, bool_to_word(b_eq(a, b))); break;
    case Opcode::ISZERO: pop1(s, a); push(s, bool_to_word(word_iszero(a))); break;
    case Opcode::AND: popn(s, {&a, &b}); push(s, w_and(a, b)); break;
    case Opcode::OR: popn(s, {&a, &b}); push(s, w_or(a, b)); break;
    case Opcode::XOR: popn(s, {&a, &b}); push(s, w_xor(a, b)); break;
    case Opcode::NOT: pop1(s, a); push(s, w_not(a)); break;
    case Opcode::BYTE: popn(s, {&a, &b}); push(s, w_byte(a, b)); break;
    case Opcode::SHL: popn(s, {&a, &b}); push(s, w_shl(a, b)); break;
    case Opcode::SHR: popn(s, {&a, &b}); push(s, w_shr(a, b)); break;
    case Opcode::SAR: popn(s, {&a, &b}); push(s, w_sar(a, b)); break;

    case Opcode::SHA3: {
      popn(s, {&a, &b});
      uint64_t off = 0, len = 0;
      if (!as_u64(s, a, "SHA3 offset", off) || !as_u64(s, b, "SHA3 length", len))
        return;
      auto range = fr.machine.memory.read_range(off, len);
      Word result;
      std::vector<Word> input_words;
      for (uint64_t i = 0; i < len; i += 32) {
        uint64_t n = std::min<uint64_t>(32, len - i);
        input_words.push_back(word_of_bytes(
            std::vector<MemByte>(range.begin() + i, range.begin() + i + n)));
      }
      auto concrete_in = as_concrete_bytes(range);
      if (concrete_in) {
        result = concrete(keccak256_word(*concrete_in));
      } else {
        std::string name = "sha3";
        for (const Word& w : input_words) name += "_" + std::to_string(w->id);
        result = symbol(s.tx_meta.instance_tag + "_" + name, SymOrigin::Fresh);
        // functional consistency against earlier symbolic applications
        for (const auto& prev : s.sha3_applications) {
          if (prev.inputs.size() != input_words.size()) continue;
          if (prev.result.get() == result.get()) continue;
          BoolTerm same_in = b_true();
          for (size_t i = 0; i < input_words.size(); ++i)
            same_in = b_and(same_in, b_eq(prev.inputs[i], input_words[i]));
          s.constraints.add(b_or(b_not(same_in), b_eq(prev.result, result)),
                            Provenance::Environment, code.id, ins.offset);
        }
        s.sha3_applications.push_back({input_words, result});
      }
      keccak_track_sha3(input_words, result, s.keccak_map);
      push(s, result);
      break;
    }

    case Opcode::ADDRESS: push(s, concrete(fr.env.active_account)); break;
    case Opcode::BALANCE: pop1(s, a); push(s, balance_of(s, a)); break;
    case Opcode::ORIGIN: push(s, fr.env.origin); break;
    case Opcode::CALLER: push(s, fr.env.sender); break;
    case Opcode::CALLVALUE: push(s, fr.env.callvalue); break;
    case Opcode::CALLDATALOAD:
      pop1(s, a);
      push(s, fr.env.calldata.load_word(a, &s.warnings));
      break;
    case Opcode::CALLDATASIZE: push(s, fr.env.calldata.size_word()); break;
    case Opcode::CALLDATACOPY: {
      popn(s, {&a, &b, &c});
      uint64_t dest = 0, src = 0, len = 0;
      if (!as_u64(s, a, "CALLDATACOPY dest", dest)) return;
      Word src_w = simplify(b), len_w = simplify(c);
      if (!len_w->is_concrete() || !src_w->is_concrete()) {
        // length depends on calldatasize: copy a bounded symbolic window
        s.warnings.push_back("symbolic CALLDATACOPY region; copied 64-byte window");
        for (uint64_t k = 0; k < 2; ++k) {
          Word wsrc = fr.env.calldata.load_word(
              src_w->is_concrete() ? w_add(src_w, concrete(32 * k))
                                   : s.fresh_symbol("cdc_off", SymOrigin::Calldata),
              &s.warnings);
          fr.machine.memory.store_word(dest + 32 * k, wsrc);
        }
        break;
      }
      src = static_cast<uint64_t>(src_w->value);
      len = static_cast<uint64_t>(len_w->value);
      if (len > (1ull << 24)) { s.halt(TerminalKind::Invalid, "oversized copy"); return; }
      if (fr.env.calldata.symbolic) {
        for (uint64_t i = 0; i < len; ++i) {
          uint64_t pos = src + i;
          Word wsrc = fr.env.calldata.load_word(concrete((pos / 32) * 32), &s.warnings);
          fr.machine.memory.store_byte(dest + i, {wsrc, static_cast<uint8_t>(pos % 32)});
        }
      } else {
        for (uint64_t i = 0; i < len; ++i) {
          uint64_t pos = src + i;
          MemByte mb = pos < fr.env.calldata.buffer.size()
                           ? fr.env.calldata.buffer[pos]
                           : concrete_byte(0);
          fr.machine.memory.store_byte(dest + i, mb);
        }
      }
      if (len) fr.machine.memory.touch(dest, len);
      break;
    }
    case Opcode::CODESIZE:
      push(s, concrete(u256(code.bytes.size() + fr.env.creation_args_len)));
      break;
    case Opcode::CODECOPY: {
      popn(s, {&a, &b, &c});
      uint64_t dest = 0, src = 0, len = 0;
      if (!as_u64(s, a, "CODECOPY dest", dest) || !as_u64(s, b, "CODECOPY src", src) ||
          !as_u64(s, c, "CODECOPY length", len))
        return;
      if (len > (1ull << 24)) { s.halt(TerminalKind::Invalid, "oversized copy"); return; }
      for (uint64_t i = 0; i < len; ++i) {
        uint64_t pos = src + i;
        if (pos < code.bytes.size()) {
          fr.machine.memory.store_byte(dest + i, concrete_byte(code.bytes[pos]));
        } else if (fr.env.is_creation) {
          // appended constructor arguments: symbolic, word-aligned past the code
          uint64_t arg = pos - code.bytes.size();
          Word wsrc = symbol("ctorarg_" + s.tx_meta.instance_tag + "_" +
                                 std::to_string(arg / 32),
                             SymOrigin::Calldata);
          fr.machine.memory.store_byte(dest + i, {wsrc, static_cast<uint8_t>(arg % 32)});
        } else {
          fr.machine.memory.store_byte(dest + i, concrete_byte(0));
        }
      }
      if (len) fr.machine.memory.touch(dest, len);
      break;
    }
    case Opcode::GASPRICE:
      push(s, symbol("gasprice_" + s.tx_meta.instance_tag, SymOrigin::BlockContext));
      break;
    case Opcode::EXTCODESIZE: {
      pop1(s, a);
      Word addr = simplify(a);
      if (addr->is_concrete()) {
        auto it = s.world.find(addr->value & ((u256(1) << 160) - 1));
        if (it != s.world.end() && it->second.code) {
          push(s, concrete(u256(it->second.code->bytes.size())));
          break;
        }
      }
      push(s, s.fresh_symbol("extcodesize", SymOrigin::Fresh));
      break;
    }
    case Opcode::EXTCODECOPY: {
      Word d;
      popn(s, {&a, &d, &b, &c});
      uint64_t dest = 0, src = 0, len = 0;
      if (!as_u64(s, d, "EXTCODECOPY dest", dest) || !as_u64(s, b, "EXTCODECOPY src", src) ||
          !as_u64(s, c, "EXTCODECOPY length", len))
        return;
      Word addr = simplify(a);
      const std::vector<uint8_t>* bytes = nullptr;
      if (addr->is_concrete()) {
        auto it = s.world.find(addr->value & ((u256(1) << 160) - 1));
        if (it != s.world.end() && it->second.code) bytes = &it->second.code->bytes;
      }
      for (uint64_t i = 0; i < len && len <= (1ull << 24); ++i) {
        uint8_t v = bytes && src + i < bytes->size() ? (*bytes)[src + i] : 0;
        fr.machine.memory.store_byte(dest + i, concrete_byte(v));
      }
      break;
    }
    case Opcode::RETURNDATASIZE:
      push(s, concrete(u256(fr.machine.returndata.size())));
      break;
    case Opcode::RETURNDATACOPY: {
      popn(s, {&a, &b, &c});
      uint64_t dest = 0, src = 0, len = 0;
      if (!as_u64(s, a, "RETURNDATACOPY dest", dest) ||
          !as_u64(s, b, "RETURNDATACOPY src", src) ||
          !as_u64(s, c, "RETURNDATACOPY length", len))
        return;
      for (uint64_t i = 0; i < len && len <= (1ull << 24); ++i) {
        MemByte mb = src + i < fr.machine.returndata.size()
                         ? fr.machine.returndata[src + i]
                         : concrete_byte(0);
        fr.machine.memory.store_byte(dest + i, mb);
      }
      break;
    }

    case Opcode::BLOCKHASH:
      pop1(s, a);
      push(s, s.fresh_symbol("blockhash", SymOrigin::BlockContext));
      break;
    case Opcode::COINBASE: push(s, fr.env.block.coinbase); break;
    case Opcode::TIMESTAMP: push(s, fr.env.block.timestamp); break;
    case Opcode::NUMBER: push(s, fr.env.block.number); break;
    case Opcode::DIFFICULTY: push(s, fr.env.block.difficulty); break;
    case Opcode::GASLIMIT: push(s, fr.env.block.gaslimit); break;

    case Opcode::POP: pop1(s, a); break;
    case Opcode::MLOAD: {
      pop1(s, a);
      Word off = simplify(a);
      if (!off->is_concrete() || off->value > (u256(1) << 32)) {
        s.warnings.push_back("symbolic MLOAD offset; read widened to fresh symbol");
        push(s, s.fresh_symbol("mload", SymOrigin::Fresh));
        break;
      }
      push(s, fr.machine.memory.load_word(static_cast<uint64_t>(off->value)));
      break;
    }
    case Opcode::MSTORE: {
      popn(s, {&a, &b});
      Word off = simplify(a);
      if (!off->is_concrete() || off->value > (u256(1) << 32)) {
        s.warnings.push_back("symbolic MSTORE offset; write dropped");
        break;
      }
      fr.machine.memory.store_word(static_cast<uint64_t>(off->value), b);
      break;
    }
    case Opcode::MSTORE8: {
      popn(s, {&a, &b});
      Word off = simplify(a);
      if (!off->is_concrete() || off->value > (u256(1) << 32)) {
        s.warnings.push_back("symbolic MSTORE8 offset; write dropped");
        break;
      }
      Word low = w_and(b, concrete(0xff));
      fr.machine.memory.store_byte(static_cast<uint64_t>(off->value),
                                   low->is_concrete()
                                       ? concrete_byte(static_cast<uint8_t>(low->value))
                                       : MemByte{low, 31});
      break;
    }
    case Opcode::SLOAD: {
      pop1(s, a);
      AccountState& acct = s.account(fr.env.storage_account);
      push(s, acct.storage.read(a, s.storage_tag(fr.env.storage_account)));
      break;
    }
    case Opcode::SSTORE: {
      popn(s, {&a, &b});
      if (fr.env.is_static) {
        s.invalid_code_id = code.id;
        s.invalid_pc = ins.offset;
        s.halt(TerminalKind::Invalid, "SSTORE in static call");
        return;
      }
      s.account(fr.env.storage_account).storage.write(a, b);
      s.sstore_log.push_back({fr.env.storage_account, simplify(a), simplify(b),
                              code.id, ins.offset,
                              s.frames.front().env.is_creation});
      break;
    }

    case Opcode::JUMP: {
      pop1(s, a);
      Word target = simplify(a);
      if (!target->is_concrete()) {
        s.halt(TerminalKind::Invalid, "symbolic jump target");
        return;
      }
      uint32_t t = static_cast<uint32_t>(target->value & 0xffffffff);
      if (!code.jumpdests.count(t)) {
        s.halt(TerminalKind::Invalid, "jump to non-JUMPDEST");
        return;
      }
      if (++s.jumps_taken > bounds_.max_jumps) {
        s.labels.insert(StateLabel::Ignore);
        s.halt(TerminalKind::Invalid, "jump budget exhausted");
        return;
      }
      if (t <= ins.offset) {
        unsigned& n = s.backedge_counts[{code.id, t}];
        if (++n > bounds_.loop_bound) {
          s.labels.insert(StateLabel::Ignore);
          s.halt(TerminalKind::Invalid, "loop bound exceeded");
          return;
        }
      }
      fr.machine.pc = t;
      return;
    }

    case Opcode::JUMPI: {
      popn(s, {&a, &b});
      Word target = simplify(a);
      BoolTerm cond = word_nonzero(b);
      if (cond->is_literal()) {
        if (cond->is_false()) { advance(s, ins); return; }
        if (!target->is_concrete()) {
          s.halt(TerminalKind::Invalid, "symbolic jump target");
          return;
        }
        uint32_t t = static_cast<uint32_t>(target->value & 0xffffffff);
        if (!code.jumpdests.count(t)) {
          s.halt(TerminalKind::Invalid, "jump to non-JUMPDEST");
          return;
        }
        if (++s.jumps_taken > bounds_.max_jumps) {
          s.labels.insert(StateLabel::Ignore);
          s.halt(TerminalKind::Invalid, "jump budget exhausted");
          return;
        }
        if (t <= ins.offset) {
          unsigned& n = s.backedge_counts[{code.id, t}];
          if (++n > bounds_.loop_bound) {
            s.labels.insert(StateLabel::Ignore);
            s.halt(TerminalKind::Invalid, "loop bound exceeded");
            return;
          }
        }
        fr.machine.pc = t;
        return;
      }

      // symbolic condition: fork
      auto taken = std::make_shared<GlobalState>(s);
      auto fall = std::make_shared<GlobalState>(s);

      fall->constraints.add(b_not(cond), Provenance::ContractPath, code.id, ins.offset);
      advance(*fall, ins);

      bool taken_ok = true;
      if (!target->is_concrete()) {
        taken->halt(TerminalKind::Invalid, "symbolic jump target");
        taken_ok = false;
      } else {
        uint32_t t = static_cast<uint32_t>(target->value & 0xffffffff);
        if (!code.jumpdests.count(t)) {
          taken->halt(TerminalKind::Invalid, "jump to non-JUMPDEST");
          taken_ok = false;
        } else {
          taken->constraints.add(cond, Provenance::ContractPath, code.id, ins.offset);
          if (++taken->jumps_taken > bounds_.max_jumps) {
            taken->labels.insert(StateLabel::Ignore);
            taken->halt(TerminalKind::Invalid, "jump budget exhausted");
          } else if (t <= ins.offset) {
            unsigned& n = taken->backedge_counts[{code.id, t}];
            if (++n > bounds_.loop_bound) {
              taken->labels.insert(StateLabel::Ignore);
              taken->halt(TerminalKind::Invalid, "loop bound exceeded");
            } else {
              taken->machine().pc = t;
            }
          } else {
            taken->machine().pc = t;
          }
        }
      }

      if (taken_ok && feasible(*taken, b_true())) {
        out.push_back(taken);
      } else if (taken_ok) {
        ++pruned_;
      }
      if (feasible(*fall, b_true())) {
        out.push_back(fall);
      } else {
        ++pruned_;
      }
      // mark the original superseded
      s.halt(TerminalKind::Invalid, "superseded by fork");
      s.labels.insert(StateLabel::Ignore);
      return;
    }

    case Opcode::PC: push(s, concrete(ins.offset)); break;
    case Opcode::MSIZE: push(s, concrete(u256(fr.machine.memory.active_size()))); break;
    case Opcode::GAS: push(s, s.fresh_symbol("gas", SymOrigin::Fresh)); break;
    case Opcode::JUMPDEST: break;

    case Opcode::CREATE:
    case Opcode::CALL:
    case Opcode::CALLCODE:
    case Opcode::DELEGATECALL:
    case Opcode::STATICCALL: {
      // the caller resumes past the call site; a pushed frame starts at pc 0
      advance(s, ins);
      CallKind kind = op == Opcode::CREATE         ? CallKind::Create
                      : op == Opcode::CALL         ? CallKind::Call
                      : op == Opcode::CALLCODE     ? CallKind::CallCode
                      : op == Opcode::DELEGATECALL ? CallKind::DelegateCall
                                                   : CallKind::StaticCall;
      handle_call(s, kind, ins.offset);
      return;
    }

    case Opcode::RETURN:
    case Opcode::REVERT: {
      popn(s, {&a, &b});
      uint64_t off = 0, len = 0;
      if (!as_u64(s, a, "output offset", off) || !as_u64(s, b, "output length", len))
        return;
      s.return_data = fr.machine.memory.read_range(off, len);
      s.halt(op == Opcode::RETURN ? TerminalKind::Return : TerminalKind::Revert);
      if (s.frames.size() > 1) return_from_frame(s);
      return;
    }
    case Opcode::SELFDESTRUCT:
      pop1(s, a);
      s.halt(TerminalKind::SelfDestruct);
      if (s.frames.size() > 1) return_from_frame(s);
      return;
    case Opcode::INVALID:
      s.invalid_code_id = code.id;
      s.invalid_pc = ins.offset;
      s.halt(TerminalKind::Invalid, "INVALID instruction");
      return;

    default: {
      uint8_t raw = static_cast<uint8_t>(op);
      if (raw >= 0x60 && raw <= 0x7f) {  // PUSH1..PUSH32
        push(s, concrete(bytes_to_word(ins.immediate.data(), ins.immediate.size())));
        break;
      }
      if (raw >= 0x80 && raw <= 0x8f) {  // DUPn
        unsigned n = raw - 0x7f;
        push(s, stack[stack.size() - n]);
        break;
      }
      if (raw >= 0x90 && raw <= 0x9f) {  // SWAPn
        unsigned n = raw - 0x8f;
        std::swap(stack[stack.size() - 1], stack[stack.size() - 1 - n]);
        break;
      }
      if (raw >= 0xa0 && raw <= 0xa4) {  // LOGn: pop and ignore
        for (unsigned i = 0; i < stack_pops(op); ++i) pop1(s, a);
        break;
      }
      s.halt(TerminalKind::Invalid, "unhandled opcode");
      return;
    }
  }

  if (!s.is_terminal()) advance(s, ins);
}

std::vector<std::shared_ptr<GlobalState>> Explorer::step(GlobalState& s) {
  std::vector<std::shared_ptr<GlobalState>> out;
  exec_instruction(s, out);
  if (out.empty() && !s.is_terminal())
    out.push_back(std::make_shared<GlobalState>(s));
  return out;
}

StateSpace Explorer::explore(std::shared_ptr<GlobalState> initial) {
  StateSpace space;
  space.instruction_offsets = code_offsets_;
  int64_t budget = bounds_.step_budget;
  std::vector<std::shared_ptr<GlobalState>> worklist{std::move(initial)};

  while (!worklist.empty()) {
    auto s = std::move(worklist.back());
    worklist.pop_back();
    ++space.states_explored;

    while (!s->is_terminal()) {
      if (--budget < 0) {
        s->labels.insert(StateLabel::Ignore);
        s->halt(TerminalKind::Invalid, "step budget exhausted");
        space.warnings.push_back("step budget exhausted; exploration truncated");
        break;
      }
      std::vector<std::shared_ptr<GlobalState>> children;
      exec_instruction(*s, children);
      if (!children.empty()) {
        // reverse keeps the not-taken branch first off the stack
        for (auto it = children.rbegin(); it != children.rend(); ++it)
          worklist.push_back(*it);
        s.reset();
        break;
      }
    }

    if (s && s->is_terminal()) {
      if (!(s->halt_reason == "superseded by fork")) {
        for (const auto& v : s->visited) space.visited.insert(v);
        for (const auto& w : s->warnings) space.warnings.push_back(w);
        space.terminals.push_back(std::move(s));
      }
    }
  }
  space.states_pruned = pruned_;
  space.instruction_offsets = code_offsets_;
  return space;
}

GlobalState Explorer::make_message_state(CodeRef runtime_code, const u256& address,
                                         TxMeta meta,
                                         std::map<u256, AccountState> world) const {
  GlobalState s;
  s.tx_meta = std::move(meta);
  s.world = std::move(world);

  AccountState& acct = s.world[address];
  acct.address = address;
  acct.code = runtime_code;
  acct.storage.mode = StorageMode::Symbolic;
  if (!acct.balance)
    acct.balance = symbol("balance_" + s.balance_tag(address), SymOrigin::Balance);

  Frame f;
  f.kind = CallKind::Call;
  f.env.active_account = address;
  f.env.storage_account = address;
  f.env.sender = symbol("sender_" + s.tx_meta.instance_tag, SymOrigin::Calldata);
  // distinct from the sender: an intermediary contract can sit between the
  // originating account and this call, which is what tx.origin checks miss
  f.env.origin = symbol("origin_" + s.tx_meta.instance_tag, SymOrigin::Calldata);
  f.env.callvalue = symbol("callvalue_" + s.tx_meta.instance_tag, SymOrigin::Calldata);
  f.env.code = runtime_code;
  f.env.calldata.symbolic = true;
  f.env.calldata.instance_tag = s.tx_meta.instance_tag;
  f.env.block = BlockContext::symbolic(s.tx_meta.instance_tag);
  s.frames.push_back(std::move(f));
  return s;
}

StateSpace Explorer::exec_message(CodeRef runtime_code, const u256& address,
                                  TxMeta meta, std::map<u256, AccountState> world) {
  auto s = std::make_shared<GlobalState>(
      make_message_state(std::move(runtime_code), address, std::move(meta),
                         std::move(world)));
  return explore(std::move(s));
}

StateSpace Explorer::exec_constructor(CodeRef creation_code, const u256& address,
                                      TxMeta meta, size_t ctor_args_len_hint,
                                      std::map<u256, AccountState> world) {
  GlobalState s;
  s.tx_meta = std::move(meta);
  s.world = std::move(world);

  AccountState& acct = s.world[address];
  acct.address = address;
  acct.storage.mode = StorageMode::ConcreteDefaultZero;
  if (!acct.balance)
    acct.balance = symbol("balance_" + s.balance_tag(address), SymOrigin::Balance);

  Frame f;
  f.kind = CallKind::Create;
  f.env.active_account = address;
  f.env.storage_account = address;
  f.env.sender = symbol("sender_" + s.tx_meta.instance_tag, SymOrigin::Calldata);
  f.env.origin = symbol("origin_" + s.tx_meta.instance_tag, SymOrigin::Calldata);
  f.env.callvalue = symbol("callvalue_" + s.tx_meta.instance_tag, SymOrigin::Calldata);
  f.env.code = creation_code;
  f.env.is_creation = true;
  f.env.creation_args_len = ctor_args_len_hint;
  f.env.calldata.symbolic = false;
  f.env.calldata.instance_tag = s.tx_meta.instance_tag;
  f.env.block = BlockContext::symbolic(s.tx_meta.instance_tag);
  s.frames.push_back(std::move(f));

  StateSpace space = explore(std::make_shared<GlobalState>(std::move(s)));
  bool has_return = false;
  for (const auto& t : space.terminals)
    if (t->terminal == TerminalKind::Return) has_return = true;
  if (!has_return)
    space.warnings.push_back("constructor never returns runtime code");
  return space;
}

}  // namespace annotary::symexec
