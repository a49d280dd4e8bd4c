#include "annotary/evm/instruction.hpp"

namespace annotary::evm {

bool is_known_opcode(uint8_t b) {
  if (b <= 0x0b) return true;
  if (b >= 0x10 && b <= 0x1d) return true;
  if (b == 0x20) return true;
  if (b >= 0x30 && b <= 0x3e) return true;
  if (b >= 0x40 && b <= 0x45) return true;
  if (b >= 0x50 && b <= 0x5b) return true;
  if (b >= 0x60 && b <= 0xa4) return true;  // PUSH, DUP, SWAP, LOG
  if (b == 0xf0 || b == 0xf1 || b == 0xf2 || b == 0xf3 || b == 0xf4) return true;
  if (b == 0xfa || b == 0xfd || b == 0xfe || b == 0xff) return true;
  return false;
}

std::vector<Instruction> decode(const std::vector<uint8_t>& code) {
  std::vector<Instruction> out;
  size_t i = 0;
  while (i < code.size()) {
    Instruction ins;
    ins.offset = static_cast<uint32_t>(i);
    uint8_t b = code[i];
    if (!is_known_opcode(b)) {
      ins.opcode = Opcode::INVALID;
      ins.valid = false;
      out.push_back(std::move(ins));
      ++i;
      continue;
    }
    ins.opcode = static_cast<Opcode>(b);
    ins.valid = b != 0xfe;
    ++i;
    if (ins.is_push()) {
      unsigned width = ins.push_width();
      ins.immediate.assign(width, 0);
      for (unsigned k = 0; k < width; ++k)
        if (i + k < code.size()) ins.immediate[k] = code[i + k];
      i += width;
    }
    out.push_back(std::move(ins));
  }
  return out;
}

std::vector<uint8_t> encode(const std::vector<Instruction>& instructions) {
  std::vector<uint8_t> out;
  for (const auto& ins : instructions) {
    out.push_back(static_cast<uint8_t>(ins.opcode));
    out.insert(out.end(), ins.immediate.begin(), ins.immediate.end());
  }
  return out;
}

const char* opcode_name(Opcode op) {
  uint8_t b = static_cast<uint8_t>(op);
  switch (op) {
    case Opcode::STOP: return "STOP";
    case Opcode::ADD: return "ADD";
    case Opcode::MUL: return "MUL";
    case Opcode::SUB: return "SUB";
    case Opcode::DIV: return "DIV";
    case Opcode::SDIV: return "SDIV";
    case Opcode::MOD: return "MOD";
    case Opcode::SMOD: return "SMOD";
    case Opcode::ADDMOD: return "ADDMOD";
    case Opcode::MULMOD: return "MULMOD";
    case Opcode::EXP: return "EXP";
    case Opcode::SIGNEXTEND: return "SIGNEXTEND";
    case Opcode::LT: return "LT";
    case Opcode::GT: return "GT";
    case Opcode::SLT: return "SLT";
    case Opcode::SGT: return "SGT";
    case Opcode::EQ: return "EQ";
    case Opcode::ISZERO: return "ISZERO";
    case Opcode::AND: return "AND";
    case Opcode::OR: return "OR";
    case Opcode::XOR: return "XOR";
    case Opcode::NOT: return "NOT";
    case Opcode::BYTE: return "BYTE";
    case Opcode::SHL: return "SHL";
    case Opcode::SHR: return "SHR";
    case Opcode::SAR: return "SAR";
    case Opcode::SHA3: return "SHA3";
    case Opcode::ADDRESS: return "ADDRESS";
    case Opcode::BALANCE: return "BALANCE";
    case Opcode::ORIGIN: return "ORIGIN";
    case Opcode::CALLER: return "CALLER";
    case Opcode::CALLVALUE: return "CALLVALUE";
    case Opcode::CALLDATALOAD: return "CALLDATALOAD";
    case Opcode::CALLDATASIZE: return "CALLDATASIZE";
    case Opcode::CALLDATACOPY: return "CALLDATACOPY";
    case Opcode::CODESIZE: return "CODESIZE";
    case Opcode::CODECOPY: return "CODECOPY";
    case Opcode::GASPRICE: return "GASPRICE";
    case Opcode::EXTCODESIZE: return "EXTCODESIZE";
    case Opcode::EXTCODECOPY: return "EXTCODECOPY";
    case Opcode::RETURNDATASIZE: return "RETURNDATASIZE";
    case Opcode::RETURNDATACOPY: return "RETURNDATACOPY";
    case Opcode::BLOCKHASH: return "BLOCKHASH";
    case Opcode::COINBASE: return "COINBASE";
    case Opcode::TIMESTAMP: return "TIMESTAMP";
    case Opcode::NUMBER: return "NUMBER";
    case Opcode::DIFFICULTY: return "DIFFICULTY";
    case Opcode::GASLIMIT: return "GASLIMIT";
    case Opcode::POP: return "POP";
    case Opcode::MLOAD: return "MLOAD";
    case Opcode::MSTORE: return "MSTORE";
    case Opcode::MSTORE8: return "MSTORE8";
    case Opcode::SLOAD: return "SLOAD";
    case Opcode::SSTORE: return "SSTORE";
    case Opcode::JUMP: return "JUMP";
    case Opcode::JUMPI: return "JUMPI";
    case Opcode::PC: return "PC";
    case Opcode::MSIZE: return "MSIZE";
    case Opcode::GAS: return "GAS";
    case Opcode::JUMPDEST: return "JUMPDEST";
    case Opcode::CREATE: return "CREATE";
    case Opcode::CALL: return "CALL";
    case Opcode::CALLCODE: return "CALLCODE";
    case Opcode::RETURN: return "RETURN";
    case Opcode::DELEGATECALL: return "DELEGATECALL";
    case Opcode::STATICCALL: return "STATICCALL";
    case Opcode::REVERT: return "REVERT";
    case Opcode::INVALID: return "INVALID";
    case Opcode::SELFDESTRUCT: return "SELFDESTRUCT";
    default: break;
  }
  static thread_local char buf[16];
  if (b >= 0x60 && b <= 0x7f) { snprintf(buf, sizeof buf, "PUSH%d", b - 0x5f); return buf; }
  if (b >= 0x80 && b <= 0x8f) { snprintf(buf, sizeof buf, "DUP%d", b - 0x7f); return buf; }
  if (b >= 0x90 && b <= 0x9f) { snprintf(buf, sizeof buf, "SWAP%d", b - 0x8f); return buf; }
  if (b >= 0xa0 && b <= 0xa4) { snprintf(buf, sizeof buf, "LOG%d", b - 0xa0); return buf; }
  return "INVALID";
}

unsigned stack_pops(Opcode op) {
  uint8_t b = static_cast<uint8_t>(op);
  if (b >= 0x60 && b <= 0x7f) return 0;                    // PUSH
  if (b >= 0x80 && b <= 0x8f) return b - 0x7f;             // DUPn peeks n
  if (b >= 0x90 && b <= 0x9f) return b - 0x8e;             // SWAPn peeks n+1
  if (b >= 0xa0 && b <= 0xa4) return 2 + (b - 0xa0);       // LOGn
  switch (op) {
    case Opcode::STOP: case Opcode::JUMPDEST: case Opcode::PC:
    case Opcode::MSIZE: case Opcode::GAS: case Opcode::ADDRESS:
    case Opcode::ORIGIN: case Opcode::CALLER: case Opcode::CALLVALUE:
    case Opcode::CALLDATASIZE: case Opcode::CODESIZE: case Opcode::GASPRICE:
    case Opcode::RETURNDATASIZE: case Opcode::COINBASE: case Opcode::TIMESTAMP:
    case Opcode::NUMBER: case Opcode::DIFFICULTY: case Opcode::GASLIMIT:
    case Opcode::INVALID:
      return 0;
    case Opcode::ISZERO: case Opcode::NOT: case Opcode::POP: case Opcode::MLOAD:
    case Opcode::SLOAD: case Opcode::JUMP: case Opcode::BALANCE:
    case Opcode::CALLDATALOAD: case Opcode::EXTCODESIZE: case Opcode::BLOCKHASH:
    case Opcode::SELFDESTRUCT:
      return 1;
    case Opcode::ADD: case Opcode::MUL: case Opcode::SUB: case Opcode::DIV:
    case Opcode::SDIV: case Opcode::MOD: case Opcode::SMOD: case Opcode::EXP:
    case Opcode::SIGNEXTEND: case Opcode::LT: case Opcode::GT: case Opcode::SLT:
    case Opcode::SGT: case Opcode::EQ: case Opcode::AND: case Opcode::OR:
    case Opcode::XOR: case Opcode::BYTE: case Opcode::SHL: case Opcode::SHR:
    case Opcode::SAR: case Opcode::SHA3: case Opcode::MSTORE:
    case Opcode::MSTORE8: case Opcode::SSTORE: case Opcode::JUMPI:
    case Opcode::RETURN: case Opcode::REVERT:
      return 2;
    case Opcode::ADDMOD: case Opcode::MULMOD: case Opcode::CALLDATACOPY:
    case Opcode::CODECOPY: case Opcode::RETURNDATACOPY: case Opcode::CREATE:
      return 3;
    case Opcode::EXTCODECOPY:
      return 4;
    case Opcode::DELEGATECALL: case Opcode::STATICCALL:
      return 6;
    case Opcode::CALL: case Opcode::CALLCODE:
      return 7;
    default:
      return 0;
  }
}

unsigned stack_pushes(Opcode op) {
  uint8_t b = static_cast<uint8_t>(op);
  if (b >= 0x60 && b <= 0x7f) return 1;
  if (b >= 0x80 && b <= 0x8f) return b - 0x7f + 1;
  if (b >= 0x90 && b <= 0x9f) return b - 0x8e;
  if (b >= 0xa0 && b <= 0xa4) return 0;
  switch (op) {
    case Opcode::STOP: case Opcode::JUMPDEST: case Opcode::POP:
    case Opcode::MSTORE: case Opcode::MSTORE8: case Opcode::SSTORE:
    case Opcode::JUMP: case Opcode::JUMPI: case Opcode::CALLDATACOPY:
    case Opcode::CODECOPY: case Opcode::RETURNDATACOPY: case Opcode::EXTCODECOPY:
    case Opcode::RETURN: case Opcode::REVERT: case Opcode::INVALID:
    case Opcode::SELFDESTRUCT:
      return 0;
    default:
      return 1;
  }
}

}  // namespace annotary::evm
