#include "annotary/annotations/rewrite.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace annotary::annotations {

namespace {

struct Insertion {
  int64_t offset = 0;  // original-source coordinates
  std::string text;
  int annotation_id = -1;
  bool is_assert = false;
};

// Insertion point for a statement-level annotation: the start of the line
// following the annotation's comment, so the assert runs before whatever
// statement the annotation precedes.
int64_t next_line_start(const std::string& source, int64_t from) {
  size_t nl = source.find('\n', static_cast<size_t>(from));
  return nl == std::string::npos ? static_cast<int64_t>(source.size())
                                 : static_cast<int64_t>(nl) + 1;
}

// Parameter type attribute -> declarable type in 0.4 source ("string memory"
// -> "string", "contract Foo" -> "Foo"). Empty result means not declarable.
std::string declarable_type(const std::string& type) {
  std::string t = type;
  for (const char* suffix :
       {" memory", " storage pointer", " storage ref", " calldata"}) {
    std::string s = suffix;
    if (t.size() > s.size() && t.compare(t.size() - s.size(), s.size(), s) == 0)
      t = t.substr(0, t.size() - s.size());
  }
  if (t.rfind("contract ", 0) == 0) return t.substr(9);
  if (t.rfind("enum ", 0) == 0) return t.substr(5);
  if (t.rfind("struct ", 0) == 0 || t.rfind("mapping(", 0) == 0) return {};
  return t;
}

struct Rewriter {
  const std::string& source;
  const AstFile& ast;
  std::vector<Insertion> insertions;
  std::vector<std::string> warnings;
  int temp_counter = 0;

  void add(int64_t offset, std::string text, int ann_id, bool is_assert) {
    insertions.push_back({offset, std::move(text), ann_id, is_assert});
  }

  void statement_assert(const Annotation& ann) {
    std::string cond = ann.kind == AnnotationKind::Never
                           ? "!(" + ann.expr_text + ")"
                           : "(" + ann.expr_text + ")";
    add(next_line_start(source, ann.comment_end), "assert(" + cond + "); ",
        ann.id, true);
  }

  void invariants_for_contract(const AstContract& contract,
                               const std::vector<const Annotation*>& invs) {
    for (const AstFunction& fn : contract.functions) {
      if (fn.body.l <= 0 || fn.is_constant) continue;
      for (const Annotation* a : invs)
        add(fn.body.end() - 1, "assert(" + a->expr_text + "); ", a->id, true);
      for (const SrcSpan& ret : fn.empty_returns)
        for (const Annotation* a : invs)
          add(ret.s, "assert(" + a->expr_text + "); ", a->id, true);
      for (const auto& vr : fn.value_returns) value_return(fn, vr, invs);
    }
    proxies(contract, invs);
  }

  void value_return(const AstFunction& fn, const AstFunction::ValueReturn& vr,
                    const std::vector<const Annotation*>& invs) {
    std::string expr =
        source.substr(static_cast<size_t>(vr.expr.s),
                      static_cast<size_t>(vr.expr.l));
    size_t n = std::max<size_t>(fn.returns.size(), 1);
    std::string vars;
    for (size_t i = 0; i < n; ++i) {
      if (i) vars += ", ";
      vars += "v_ann_" + std::to_string(temp_counter) + "_" + std::to_string(i);
    }
    int scaffold_owner = invs.front()->id;
    std::string decl = n == 1 ? "var " + vars : "var (" + vars + ")";
    add(vr.span.s, decl + " = " + expr + "; ", scaffold_owner, false);
    for (const Annotation* a : invs)
      add(vr.span.s, "assert(" + a->expr_text + "); ", a->id, true);
    std::string ret_vars = n == 1 ? vars : "(" + vars + ")";
    add(vr.span.s, "return " + ret_vars + "; ", scaffold_owner, false);
    ++temp_counter;
  }

  // Inherited, non-overridden externally callable functions do not appear in
  // the derived contract's body, so the invariant asserts above never run on
  // them; a generated proxy calls each one and asserts afterwards.
  void proxies(const AstContract& contract,
               const std::vector<const Annotation*>& invs) {
    std::set<std::string> seen;
    for (const AstFunction& fn : contract.functions) seen.insert(fn.signature());

    for (size_t bi = 1; bi < contract.linearized_bases.size(); ++bi) {
      const AstContract* base = ast.contract_by_id(contract.linearized_bases[bi]);
      if (!base) continue;
      for (const AstFunction& fn : base->functions) {
        if (fn.is_constructor || fn.is_constant || fn.name.empty()) continue;
        if (fn.visibility != "public" && fn.visibility != "external") continue;
        if (!seen.insert(fn.signature()).second) continue;  // overridden

        std::string params, args;
        bool ok = true;
        for (size_t i = 0; i < fn.params.size(); ++i) {
          std::string t = declarable_type(fn.params[i].type);
          if (t.empty()) { ok = false; break; }
          if (i) { params += ", "; args += ", "; }
          std::string p = "p" + std::to_string(i);
          params += t + " " + p;
          args += p;
        }
        if (!ok) {
          warnings.push_back("no invariant proxy for " + base->name + "." +
                             fn.signature() + ": parameter type not declarable");
          continue;
        }
        std::string head = "function ann_proxy_" + std::to_string(temp_counter) +
                           "(" + params + ") public " +
                           (fn.is_payable ? "payable " : "") + "{ " + fn.name +
                           "(" + args + "); ";
        ++temp_counter;
        add(contract.body_end, head, invs.front()->id, false);
        for (const Annotation* a : invs)
          add(contract.body_end, "assert(" + a->expr_text + "); ", a->id, true);
        add(contract.body_end, "} ", invs.front()->id, false);
      }
    }
  }
};

}  // namespace

RewriteResult rewrite_source(const std::string& source,
                             const ParsedAnnotations& parsed,
                             const AstFile& ast) {
  Rewriter rw{source, ast};

  // invariants grouped per owning contract, in declaration order
  std::map<const AstContract*, std::vector<const Annotation*>> invariants;
  for (const Annotation& ann : parsed.annotations) {
    switch (ann.kind) {
      case AnnotationKind::Check:
      case AnnotationKind::Never:
        rw.statement_assert(ann);
        break;
      case AnnotationKind::Invariant: {
        const AstContract* c = ast.contract_at(ann.byte_offset);
        if (!c) {
          rw.warnings.push_back("@invariant at offset " +
                                std::to_string(ann.byte_offset) +
                                " is outside any contract; ignored");
        } else {
          invariants[c].push_back(&ann);
        }
        break;
      }
      case AnnotationKind::SetRestricted:
        break;  // enforced on traces, not in source
    }
  }
  for (const auto& [contract, invs] : invariants)
    rw.invariants_for_contract(*contract, invs);

  std::stable_sort(rw.insertions.begin(), rw.insertions.end(),
                   [](const Insertion& a, const Insertion& b) {
                     return a.offset < b.offset;
                   });

  RewriteResult result;
  result.warnings = std::move(rw.warnings);
  size_t src_pos = 0;
  for (const Insertion& ins : rw.insertions) {
    result.rewritten_source.append(source, src_pos,
                                   static_cast<size_t>(ins.offset) - src_pos);
    src_pos = static_cast<size_t>(ins.offset);
    int64_t begin = static_cast<int64_t>(result.rewritten_source.size());
    result.rewritten_source += ins.text;
    result.ranges.push_back({begin,
                             begin + static_cast<int64_t>(ins.text.size()),
                             ins.annotation_id, ins.is_assert});
  }
  result.rewritten_source.append(source, src_pos, std::string::npos);
  return result;
}

std::string strip_injected(const RewriteResult& result) {
  std::string out;
  int64_t pos = 0;
  for (const InjectedRange& r : result.ranges) {
    out.append(result.rewritten_source, static_cast<size_t>(pos),
               static_cast<size_t>(r.begin - pos));
    pos = r.end;
  }
  out.append(result.rewritten_source, static_cast<size_t>(pos),
             std::string::npos);
  return out;
}

}  // namespace annotary::annotations
