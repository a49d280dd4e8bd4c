#include "annotary/annotations/ast.hpp"

namespace annotary::annotations {

using nlohmann::json;

SrcSpan parse_src(const std::string& src) {
  SrcSpan span;
  size_t a = src.find(':');
  if (a == std::string::npos) return span;
  size_t b = src.find(':', a + 1);
  span.s = std::stoll(src.substr(0, a));
  span.l = std::stoll(src.substr(a + 1, b - a - 1));
  if (b != std::string::npos) span.f = std::stoll(src.substr(b + 1));
  return span;
}

namespace {

// legacy ASTs contain null placeholders (e.g. an omitted else branch), so
// every accessor tolerates non-object nodes
const json& attrs(const json& node) {
  static const json empty = json::object();
  if (!node.is_object()) return empty;
  auto it = node.find("attributes");
  return it == node.end() || !it->is_object() ? empty : *it;
}

const json& children(const json& node) {
  static const json empty = json::array();
  if (!node.is_object()) return empty;
  auto it = node.find("children");
  return it == node.end() || !it->is_array() ? empty : *it;
}

std::string node_name(const json& node) {
  return node.is_object() ? node.value("name", "") : std::string();
}

std::vector<AstParam> parse_params(const json& plist) {
  std::vector<AstParam> out;
  for (const auto& v : children(plist)) {
    if (node_name(v) != "VariableDeclaration") continue;
    out.push_back({attrs(v).value("name", ""), attrs(v).value("type", "")});
  }
  return out;
}

void collect_returns(const json& node, AstFunction& fn) {
  if (node_name(node) == "Return") {
    const auto& kids = children(node);
    if (kids.empty()) {
      fn.empty_returns.push_back(parse_src(node.value("src", "")));
    } else {
      AstFunction::ValueReturn vr;
      vr.span = parse_src(node.value("src", ""));
      vr.expr = kids[0].is_object() ? parse_src(kids[0].value("src", ""))
                                    : SrcSpan{};
      fn.value_returns.push_back(vr);
    }
    return;
  }
  for (const auto& c : children(node)) collect_returns(c, fn);
}

AstFunction parse_function(const json& node) {
  AstFunction fn;
  const auto& a = attrs(node);
  fn.name = a.value("name", "");
  fn.is_constructor = a.value("isConstructor", false);
  fn.is_payable = a.value("payable", false);
  fn.is_constant = a.value("constant", false);
  fn.visibility = a.value("visibility", "public");
  fn.span = parse_src(node.value("src", ""));

  int plist = 0;
  for (const auto& c : children(node)) {
    std::string n = node_name(c);
    if (n == "ParameterList") {
      (plist++ == 0 ? fn.params : fn.returns) = parse_params(c);
    } else if (n == "Block") {
      fn.body = parse_src(c.value("src", ""));
      collect_returns(c, fn);
    }
  }
  return fn;
}

}  // namespace

std::string AstFunction::signature() const {
  std::string sig = name + "(";
  for (size_t i = 0; i < params.size(); ++i) {
    if (i) sig += ",";
    sig += params[i].type;
  }
  return sig + ")";
}

const AstContract* AstFile::contract_by_id(int64_t id) const {
  for (const auto& c : contracts)
    if (c.id == id) return &c;
  return nullptr;
}

const AstContract* AstFile::contract_by_name(const std::string& name) const {
  for (const auto& c : contracts)
    if (c.name == name) return &c;
  return nullptr;
}

const AstContract* AstFile::contract_at(int64_t byte_offset) const {
  for (const auto& c : contracts)
    if (c.span.contains(byte_offset)) return &c;
  return nullptr;
}

AstFile parse_ast(const json& legacy_ast) {
  AstFile file;
  for (const auto& node : children(legacy_ast)) {
    if (node_name(node) != "ContractDefinition") continue;
    AstContract contract;
    const auto& a = attrs(node);
    contract.name = a.value("name", "");
    contract.id = node.value("id", 0);
    contract.span = parse_src(node.value("src", ""));
    contract.body_end = contract.span.end() - 1;
    for (const auto& b : a.value("linearizedBaseContracts", json::array()))
      contract.linearized_bases.push_back(b.get<int64_t>());

    for (const auto& member : children(node)) {
      std::string n = node_name(member);
      if (n == "VariableDeclaration") {
        const auto& va = attrs(member);
        if (!va.value("stateVariable", false)) continue;
        contract.state_vars.push_back({va.value("name", ""), va.value("type", ""),
                                       va.value("constant", false),
                                       parse_src(member.value("src", ""))});
      } else if (n == "FunctionDefinition") {
        contract.functions.push_back(parse_function(member));
      }
    }
    file.contracts.push_back(std::move(contract));
  }
  return file;
}

}  // namespace annotary::annotations
