#pragma once

// Thin views over the legacy (combined-JSON) Solidity AST.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace annotary::annotations {

struct SrcSpan {
  int64_t s = -1, l = -1, f = -1;
  int64_t end() const { return s + l; }
  bool contains(int64_t pos) const { return pos >= s && pos < end(); }
  bool overlaps(int64_t a, int64_t b) const { return s < b && a < end(); }
};

SrcSpan parse_src(const std::string& src);

struct AstParam {
  std::string name;
  std::string type;  // canonical type string, e.g. "uint256"
};

struct AstFunction {
  std::string name;             // empty for the fallback
  bool is_constructor = false;
  bool is_payable = false;
  bool is_constant = false;     // view/pure in 0.4 terms
  std::string visibility;       // public/external/internal/private
  std::vector<AstParam> params;
  std::vector<AstParam> returns;
  SrcSpan span;
  SrcSpan body;                 // Block span including braces; l < 0 if abstract
  std::vector<SrcSpan> empty_returns;
  struct ValueReturn {
    SrcSpan span;       // the Return statement
    SrcSpan expr;       // its expression
  };
  std::vector<ValueReturn> value_returns;
  std::string signature() const;  // canonical "name(type,...)"
};

struct AstVariable {
  std::string name;
  std::string type;   // attribute string, e.g. "mapping(address => uint256)"
  bool constant = false;
  SrcSpan span;
};

struct AstContract {
  std::string name;
  int64_t id = 0;
  std::vector<int64_t> linearized_bases;  // most derived first, self included
  std::vector<AstVariable> state_vars;
  std::vector<AstFunction> functions;
  SrcSpan span;
  int64_t body_end = -1;  // byte offset of the closing brace
};

struct AstFile {
  std::vector<AstContract> contracts;

  const AstContract* contract_by_id(int64_t id) const;
  const AstContract* contract_by_name(const std::string& name) const;
  const AstContract* contract_at(int64_t byte_offset) const;
};

AstFile parse_ast(const nlohmann::json& legacy_ast);

}  // namespace annotary::annotations
