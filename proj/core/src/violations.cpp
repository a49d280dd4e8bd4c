#include "annotary/violations/violations.hpp"

#include <algorithm>

namespace annotary::violations {

using annotations::AllowedKind;
using annotations::Annotation;
using evm::BoolTerm;
using evm::SubstitutionMap;
using evm::SymOrigin;
using evm::Word;
using evm::u256;
using solver::ConstraintSet;
using solver::Provenance;
using solver::SatKind;
using symexec::GlobalState;
using symexec::StateLabel;
using symexec::TerminalKind;
using traces::TraceKind;
using traces::TransactionTrace;

const char* to_string(ConfidenceLevel level) {
  switch (level) {
    case ConfidenceLevel::SingleTransaction: return "single_transaction";
    case ConfidenceLevel::ChainedTransaction: return "chained_transaction";
    case ConfidenceLevel::Constructed: return "constructed";
    case ConfidenceLevel::Unconfirmed: return "unconfirmed";
    case ConfidenceLevel::AvoidingContext: return "avoiding_context";
    case ConfidenceLevel::Unsatisfiable: return "unsatisfiable";
  }
  return "unknown";
}

std::vector<Violation> find_assert_violations(
    const std::vector<TransactionTrace>& all_traces, solver::Solver& solver) {
  std::vector<Violation> out;
  for (const TransactionTrace& t : all_traces) {
    if (!t.is_violating()) continue;
    Violation v;
    v.annotation_id = t.annotation_id;
    v.code_id = t.invalid_code_id;
    v.pc = t.invalid_pc;
    v.trace = t;
    if (!t.meta.functions.empty()) v.function = t.meta.functions.front();
    auto res = solver.check(t.execution);
    if (res.is_unsat()) {
      v.level = ConfidenceLevel::Unsatisfiable;
    } else {
      v.level = ConfidenceLevel::Unconfirmed;  // pending check_severity
      v.model = res.model;
    }
    out.push_back(std::move(v));
  }
  return out;
}

bool confirm_persistence(const symexec::StateSpace& space, const Violation& v,
                         solver::Solver& solver) {
  std::set<const evm::BoolNode*> required;
  std::vector<BoolTerm> injected;
  for (const auto& item : v.trace.execution.items()) {
    if (item.tag == Provenance::InjectedAnnotation)
      injected.push_back(item.term);
    else
      required.insert(item.term.get());
  }

  for (const auto& sp : space.terminals) {
    const GlobalState& s = *sp;
    if (s.terminal != TerminalKind::Stop && s.terminal != TerminalKind::Return)
      continue;
    std::vector<BoolTerm> path;
    std::set<const evm::BoolNode*> have;
    for (const auto& item : s.constraints.items()) {
      if (item.tag == Provenance::InjectedAnnotation) continue;
      path.push_back(item.term);
      have.insert(item.term.get());
    }
    bool subsumes = std::all_of(required.begin(), required.end(),
                                [&](const evm::BoolNode* n) {
                                  return have.count(n) != 0;
                                });
    if (!subsumes) continue;
    // the original program completes this path while the violated condition
    // still holds
    path.insert(path.end(), injected.begin(), injected.end());
    if (!solver.check(path).is_unsat()) return true;
  }
  return false;
}

namespace {

// Peels concrete +offset wrappers off a tracked keccak derivation and
// returns the trailing Concat argument: the base storage slot.
std::optional<u256> derivation_base_slot(const Word& derivation) {
  Word d = derivation;
  for (int depth = 0; depth < 64; ++depth) {
    if (d->is_app() && d->op == evm::WordOp::Concat) {
      const Word& tail = d->args.back();
      if (tail->is_concrete()) return tail->value;
      return std::nullopt;
    }
    if (d->is_app() && d->op == evm::WordOp::Add) {
      // one argument carries the derivation, the rest are offsets
      const Word* inner = nullptr;
      for (const Word& a : d->args)
        if (!a->is_concrete()) {
          if (inner) return std::nullopt;
          inner = &a;
        }
      if (!inner) return std::nullopt;
      d = *inner;
      continue;
    }
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

ResolvedMember resolve_storage_member(const Word& index,
                                      const annotations::StorageLayout& layout,
                                      const symexec::KeccakMap& keccak_map) {
  ResolvedMember out;
  if (index->is_concrete()) {
    for (const auto& [name, m] : layout.members) {
      if (m.slot <= index->value && index->value < m.slot + m.slot_count) {
        out.resolved = true;
        out.member = name;
        out.kind = m.kind;
        return out;
      }
    }
    return out;
  }

  auto tracked = keccak_map.find(index);
  if (tracked == keccak_map.end()) return out;
  auto base = derivation_base_slot(tracked->second);
  if (!base) return out;
  for (const auto& [name, m] : layout.members) {
    if (m.slot == *base && (m.kind == annotations::SlotKind::Mapping ||
                            m.kind == annotations::SlotKind::DynamicArray)) {
      out.resolved = true;
      out.member = name;
      out.kind = m.kind;
      return out;
    }
  }
  return out;
}

std::string identify_function(
    const GlobalState& s,
    const std::map<uint32_t, std::string>& selector_to_signature) {
  if (!s.frames.empty() && s.frames.front().env.is_creation)
    return "constructor";
  if (s.tx_meta.function_signature) return *s.tx_meta.function_signature;

  // the dispatcher's taken branch leaves `selector == <constant>` in the
  // path constraints
  for (const auto& item : s.constraints.items()) {
    const evm::BoolTerm& t = item.term;
    if (t->kind != evm::BoolKind::Cmp || t->cmp != evm::CmpOp::Eq) continue;
    const Word& a = t->lhs;
    const Word& b = t->rhs;
    const Word& c = a->is_concrete() ? a : b;
    const Word& other = a->is_concrete() ? b : a;
    if (!c->is_concrete() || other->is_concrete()) continue;
    if (c->value > 0xffffffffu) continue;
    auto it = selector_to_signature.find(static_cast<uint32_t>(c->value));
    if (it != selector_to_signature.end()) return it->second;
  }
  return "";  // default (fallback) function
}

namespace {

bool writer_allowed(const Annotation& ann, const std::string& function) {
  for (const auto& w : ann.allowed) {
    switch (w.kind) {
      case AllowedKind::Constructor:
        if (function == "constructor") return true;
        break;
      case AllowedKind::FunctionName: {
        std::string name = function.substr(0, function.find('('));
        if (!name.empty() && name == w.text) return true;
        break;
      }
      case AllowedKind::FunctionSignature:
        if (function == w.text) return true;
        break;
    }
  }
  return false;
}

bool member_protected(const Annotation& ann, const std::string& member) {
  for (const auto& m : ann.members)
    if (m.member == member) return true;
  return false;
}

TransactionTrace trace_of_terminal(const GlobalState& s, int annotation_id,
                                   uint64_t code_id, uint32_t pc) {
  TransactionTrace t;
  t.kind = TraceKind::Violating;
  t.execution = s.constraints;
  for (const auto& item : s.constraints.items()) {
    std::set<Word> syms;
    evm::collect_symbols(item.term, syms);
    bool state = false;
    for (const Word& sym : syms)
      if (sym->is_symbol() && (sym->origin == SymOrigin::Storage ||
                               sym->origin == SymOrigin::Balance))
        state = true;
    if (state) t.phi.add(item.term, item.tag, item.code_id, item.pc);
  }
  t.annotation_id = annotation_id;
  t.invalid_code_id = code_id;
  t.invalid_pc = pc;
  traces::refresh_symbol_sets(t);
  return t;
}

}  // namespace

std::vector<Violation> find_set_restricted_violations(
    const symexec::StateSpace& space, const Annotation& ann,
    const annotations::StorageLayout& layout,
    const std::map<uint32_t, std::string>& selector_to_signature,
    solver::Solver& solver) {
  std::vector<Violation> out;
  std::set<std::pair<uint32_t, std::string>> seen;  // (pc, member/note)

  for (const auto& sp : space.terminals) {
    const GlobalState& s = *sp;
    // only writes on persisting paths can violate the restriction
    if (s.terminal != TerminalKind::Stop && s.terminal != TerminalKind::Return)
      continue;
    if (s.has_label(StateLabel::Ignore)) continue;

    std::string function = identify_function(s, selector_to_signature);
    if (writer_allowed(ann, function)) continue;

    auto emit = [&](const symexec::SStoreEvent& ev, const std::string& member,
                    const std::string& note) {
      if (!seen.insert({ev.pc, member.empty() ? note : member}).second) return;
      Violation v;
      v.annotation_id = ann.id;
      v.code_id = ev.code_id;
      v.pc = ev.pc;
      v.function = function;
      v.member = member;
      v.note = note;
      v.trace = trace_of_terminal(s, ann.id, ev.code_id, ev.pc);
      auto res = solver.check(s.constraints);
      if (res.is_unsat()) {
        v.level = ConfidenceLevel::Unsatisfiable;
      } else {
        v.level = ConfidenceLevel::Unconfirmed;
        v.model = res.model;
      }
      out.push_back(std::move(v));
    };

    for (const auto& ev : s.sstore_log) {
      auto resolved = resolve_storage_member(ev.key, layout, s.keccak_map);
      if (resolved.resolved) {
        if (member_protected(ann, resolved.member))
          emit(ev, resolved.member, "");
      } else {
        // cannot prove the write misses a protected member
        emit(ev, "", "unresolved storage index");
      }
    }
    for (const auto& reset : s.delegate_resets) {
      symexec::SStoreEvent ev;
      ev.code_id = reset.code_id;
      ev.pc = reset.pc;
      emit(ev, "", "unresolvable delegatecall may write protected members");
    }
  }
  return out;
}

traces::TransactionTrace zeroize_storage_vars(const TransactionTrace& t) {
  std::set<Word> syms;
  for (const auto& item : t.phi.items()) evm::collect_symbols(item.term, syms);
  for (const auto& item : t.execution.items())
    evm::collect_symbols(item.term, syms);
  for (const auto& [k, v] : t.delta) evm::collect_symbols(v, syms);

  SubstitutionMap sub;
  for (const Word& s : syms)
    if (s->is_symbol() && s->origin == SymOrigin::Storage)
      sub[s.get()] = evm::concrete(0);

  TransactionTrace out = t;
  ConstraintSet phi, execution;
  for (const auto& item : t.phi.items())
    phi.add(evm::substitute(item.term, sub), item.tag, item.code_id, item.pc);
  for (const auto& item : t.execution.items())
    execution.add(evm::substitute(item.term, sub), item.tag, item.code_id,
                  item.pc);
  out.phi = std::move(phi);
  out.execution = std::move(execution);
  for (auto& [k, v] : out.delta) v = evm::simplify(evm::substitute(v, sub));
  traces::refresh_symbol_sets(out);
  return out;
}

namespace {

// reads-keys whose handed-out symbol still occurs in the checked constraints
std::set<Word, evm::WordIdLess> open_state_keys(const TransactionTrace& t) {
  std::set<std::string> live =
      traces::state_symbols(t.is_violating() ? t.execution : t.phi);
  std::set<Word, evm::WordIdLess> keys;
  for (const auto& [k, sym] : t.reads)
    if (live.count(sym->name)) keys.insert(k);
  return keys;
}

bool delta_intersects(const TransactionTrace& t,
                      const std::set<Word, evm::WordIdLess>& keys) {
  for (const auto& [k, v] : t.delta)
    if (keys.count(k)) return true;
  return false;
}

struct OpenSequence {
  TransactionTrace combined;
  std::vector<TransactionTrace> heads;  // prepended traces, execution order
};

}  // namespace

SeverityResult check_severity(const TransactionTrace& violating,
                              const std::vector<TransactionTrace>& tc,
                              const std::vector<TransactionTrace>& tm,
                              int max_depth, bool pref_ind,
                              solver::Solver& solver) {
  SeverityResult result;
  SatKind base = traces::validity(violating, solver);
  if (base == SatKind::Unsat) {
    result.level = ConfidenceLevel::Unsatisfiable;
    return result;
  }
  if (base == SatKind::Sat && traces::is_state_independent(violating)) {
    result.level = ConfidenceLevel::SingleTransaction;
    result.chain = {violating};
    return result;
  }

  std::optional<SeverityResult> constructed;
  std::vector<OpenSequence> frontier{{violating, {}}};

  for (int d = 1; d <= max_depth && !frontier.empty(); ++d) {
    std::vector<OpenSequence> next;
    for (const OpenSequence& open : frontier) {
      auto keys = open_state_keys(open.combined);
      if (keys.empty()) continue;  // nothing left to discharge backwards

      auto try_trace = [&](const TransactionTrace& t) {
        // a constructor is never irrelevant: zeroization discharges even the
        // keys it does not write
        if (t.kind != TraceKind::Constructor && !delta_intersects(t, keys))
          return false;  // irrelevant writer
        auto c = traces::chain(t, open.combined, solver);
        if (!c) return false;  // chain not satisfiable

        std::vector<TransactionTrace> heads;
        heads.push_back(t);
        heads.insert(heads.end(), open.heads.begin(), open.heads.end());

        if (t.kind == TraceKind::Constructor) {
          // pre-construction storage is empty; a constructor can never be
          // preceded by anything, so zeroize and finish this branch
          TransactionTrace z = zeroize_storage_vars(*c);
          if (traces::validity(z, solver) == SatKind::Sat && !constructed) {
            constructed = SeverityResult{ConfidenceLevel::Constructed, heads};
            constructed->chain.push_back(z);
          }
          return !pref_ind && constructed.has_value();
        }

        SatKind sat = traces::validity(*c, solver);
        if (sat == SatKind::Unsat) return false;
        if (sat == SatKind::Sat && traces::is_state_independent(*c)) {
          result.level = ConfidenceLevel::ChainedTransaction;
          result.chain = std::move(heads);
          result.chain.push_back(*c);
          return true;
        }
        next.push_back({std::move(*c), std::move(heads)});
        return false;
      };

      for (const TransactionTrace& t : tm)
        if (try_trace(t)) return result.chain.empty() ? *constructed : result;
      for (const TransactionTrace& t : tc)
        if (try_trace(t)) return result.chain.empty() ? *constructed : result;
    }
    frontier = std::move(next);
  }

  if (constructed) return *constructed;
  result.level = frontier.empty() ? ConfidenceLevel::AvoidingContext
                                  : ConfidenceLevel::Unconfirmed;
  return result;
}

}  // namespace annotary::violations
