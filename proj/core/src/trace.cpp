#include "annotary/traces/trace.hpp"

#include "annotary/solver/smtlib.hpp"

namespace annotary::traces {

using evm::BoolTerm;
using evm::SubstitutionMap;
using evm::SymOrigin;
using evm::u256;
using solver::ConstraintSet;
using solver::SatKind;
using symexec::GlobalState;
using symexec::StateLabel;
using symexec::TerminalKind;

Word balance_key() {
  // never appears in real slot expressions: '#' cannot occur in a storage
  // index term rendered by the explorer
  return evm::symbol("#balance", SymOrigin::Balance);
}

namespace {

bool is_state_symbol(const Word& s) {
  return s->is_symbol() &&
         (s->origin == SymOrigin::Storage || s->origin == SymOrigin::Balance);
}

void collect_state_and_tx(const Word& w, std::set<std::string>& state,
                          std::set<std::string>& tx) {
  std::set<Word> syms;
  evm::collect_symbols(w, syms);
  for (const Word& s : syms) (is_state_symbol(s) ? state : tx).insert(s->name);
}

void collect_state_and_tx(const BoolTerm& b, std::set<std::string>& state,
                          std::set<std::string>& tx) {
  std::set<Word> syms;
  evm::collect_symbols(b, syms);
  for (const Word& s : syms) (is_state_symbol(s) ? state : tx).insert(s->name);
}

bool references_state(const BoolTerm& b) {
  std::set<Word> syms;
  evm::collect_symbols(b, syms);
  for (const Word& s : syms)
    if (is_state_symbol(s)) return true;
  return false;
}

ConstraintSet substituted(const ConstraintSet& cs, const SubstitutionMap& sub) {
  ConstraintSet out;
  for (const auto& item : cs.items())
    out.add(evm::substitute(item.term, sub), item.tag, item.code_id, item.pc);
  return out;
}

}  // namespace

std::set<std::string> state_symbols(const ConstraintSet& cs) {
  std::set<std::string> state, tx;
  for (const auto& item : cs.items())
    collect_state_and_tx(item.term, state, tx);
  return state;
}

void refresh_symbol_sets(TransactionTrace& t) {
  t.meta.storage_vars.clear();
  t.meta.tx_vars.clear();
  for (const auto& item : t.phi.items())
    collect_state_and_tx(item.term, t.meta.storage_vars, t.meta.tx_vars);
  for (const auto& item : t.execution.items())
    collect_state_and_tx(item.term, t.meta.storage_vars, t.meta.tx_vars);
  for (const auto& [k, v] : t.delta) {
    collect_state_and_tx(k, t.meta.storage_vars, t.meta.tx_vars);
    collect_state_and_tx(v, t.meta.storage_vars, t.meta.tx_vars);
  }
}

std::vector<TransactionTrace> extract_traces(const symexec::StateSpace& space,
                                             const u256& address,
                                             solver::Solver& solver) {
  std::vector<TransactionTrace> out;
  for (const auto& sp : space.terminals) {
    const GlobalState& s = *sp;
    if (!s.is_terminal()) continue;

    bool violating = s.has_label(StateLabel::Violating);
    if (!violating) {
      if (s.has_label(StateLabel::Ignore)) continue;
      // SELFDESTRUCT ends the account: nothing persists for later
      // transactions; REVERT/INVALID persist nothing at all
      if (s.terminal != TerminalKind::Stop && s.terminal != TerminalKind::Return)
        continue;
    }

    auto acct_it = s.world.find(address);
    if (acct_it == s.world.end()) continue;
    const evm::AccountState& acct = acct_it->second;
    bool creation = !s.frames.empty() && s.frames.front().env.is_creation;

    TransactionTrace t;
    t.kind = violating ? TraceKind::Violating
                       : (creation ? TraceKind::Constructor : TraceKind::Message);
    t.constructed = creation;

    for (const auto& [k, sym] : acct.storage.initial_reads()) t.reads[k] = sym;
    Word init_balance = evm::symbol("balance_" + s.balance_tag(address),
                                    SymOrigin::Balance);
    t.reads[balance_key()] = init_balance;

    for (const auto& [k, v] : acct.storage.entries()) {
      auto rd = t.reads.find(k);
      if (rd != t.reads.end() && rd->second.get() == v.get())
        continue;  // wrote back the value it read
      if (creation && v->is_concrete(0))
        continue;  // pre-construction storage is already zero
      t.delta[k] = v;
    }
    if (acct.balance && acct.balance.get() != init_balance.get())
      t.delta[balance_key()] = acct.balance;

    t.execution = s.constraints;
    for (const auto& item : s.constraints.items())
      if (references_state(item.term))
        t.phi.add(item.term, item.tag, item.code_id, item.pc);

    if (violating) {
      t.annotation_id = s.violated_annotation;
      t.invalid_code_id = s.invalid_code_id;
      t.invalid_pc = s.invalid_pc;
    } else {
      // a constructor with an empty delta still matters: it anchors the
      // all-zero pre-construction storage for severity chaining
      if (t.delta.empty() && !creation) continue;  // unchanged persisted state
      if (solver.check(s.constraints).is_unsat()) continue;
    }

    if (s.tx_meta.function_signature)
      t.meta.functions.push_back(*s.tx_meta.function_signature);
    else if (creation)
      t.meta.functions.push_back("constructor");

    refresh_symbol_sets(t);
    out.push_back(std::move(t));
  }
  return out;
}

std::optional<TransactionTrace> chain(const TransactionTrace& t1,
                                      const TransactionTrace& t2,
                                      solver::Solver& solver) {
  SubstitutionMap sub;

  // state symbols of t2 whose key t1 wrote are replaced by t1's value;
  // common untouched reads unify onto t1's symbol
  for (const auto& [k, sym] : t2.reads) {
    auto written = t1.delta.find(k);
    if (written != t1.delta.end()) {
      sub[sym.get()] = written->second;
      continue;
    }
    auto shared = t1.reads.find(k);
    if (shared != t1.reads.end() && shared->second.get() != sym.get())
      sub[sym.get()] = shared->second;
  }

  // transaction symbols of t2 colliding with names already used by t1 get a
  // depth-qualified rename
  std::set<std::string> taken = t1.meta.tx_vars;
  taken.insert(t1.meta.storage_vars.begin(), t1.meta.storage_vars.end());
  std::set<Word> t2_syms;
  for (const auto& item : t2.phi.items()) evm::collect_symbols(item.term, t2_syms);
  for (const auto& item : t2.execution.items())
    evm::collect_symbols(item.term, t2_syms);
  for (const auto& [k, v] : t2.delta) {
    evm::collect_symbols(k, t2_syms);
    evm::collect_symbols(v, t2_syms);
  }
  std::string suffix = "~x" + std::to_string(t1.meta.tx_depth);
  for (const Word& s : t2_syms) {
    if (is_state_symbol(s)) continue;
    if (!taken.count(s->name)) continue;
    if (sub.count(s.get())) continue;
    sub[s.get()] = evm::symbol(s->name + suffix, s->origin);
  }

  TransactionTrace out;
  out.kind = t2.kind;
  out.constructed = t1.kind == TraceKind::Constructor || t1.constructed;

  out.delta = t1.delta;
  for (const auto& [k, v] : t2.delta)
    out.delta[evm::simplify(evm::substitute(k, sub))] =
        evm::simplify(evm::substitute(v, sub));

  out.reads = t1.reads;
  for (const auto& [k, sym] : t2.reads) {
    if (sub.count(sym.get())) continue;  // substituted away
    out.reads.emplace(evm::simplify(evm::substitute(k, sub)), sym);
  }

  out.phi = t1.phi;
  ConstraintSet phi2 = substituted(t2.phi, sub);
  for (const auto& item : phi2.items())
    out.phi.add(item.term, item.tag, item.code_id, item.pc);
  out.execution = t1.execution;
  ConstraintSet exec2 = substituted(t2.execution, sub);
  for (const auto& item : exec2.items())
    out.execution.add(item.term, item.tag, item.code_id, item.pc);

  out.meta.tx_depth = t1.meta.tx_depth + t2.meta.tx_depth;
  out.meta.functions = t1.meta.functions;
  out.meta.functions.insert(out.meta.functions.end(),
                            t2.meta.functions.begin(), t2.meta.functions.end());
  out.annotation_id = t2.annotation_id;
  out.invalid_code_id = t2.invalid_code_id;
  out.invalid_pc = t2.invalid_pc;
  refresh_symbol_sets(out);

  const ConstraintSet& checked =
      out.is_violating() ? out.execution : out.phi;
  if (solver.check(checked).is_unsat()) return std::nullopt;
  return out;
}

SatKind validity(const TransactionTrace& t, solver::Solver& solver) {
  const ConstraintSet& cs = t.is_violating() ? t.execution : t.phi;
  return solver.check(cs).kind;
}

bool is_state_independent(const TransactionTrace& t) {
  return state_symbols(t.is_violating() ? t.execution : t.phi).empty();
}

nlohmann::json to_json(const TransactionTrace& t) {
  nlohmann::json j;
  j["kind"] = t.kind == TraceKind::Constructor ? "constructor"
              : t.kind == TraceKind::Message   ? "message"
                                               : "violating";
  j["constructed"] = t.constructed;
  j["delta"] = nlohmann::json::array();
  for (const auto& [k, v] : t.delta)
    j["delta"].push_back({{"key", evm::to_string(k)},
                          {"value", evm::to_string(v)},
                          {"value_smtlib", solver::to_smtlib(v)}});
  j["phi"] = nlohmann::json::array();
  for (const auto& item : t.phi.items())
    j["phi"].push_back(solver::to_smtlib(item.term));
  j["meta"] = {{"tx_depth", t.meta.tx_depth},
               {"functions", t.meta.functions},
               {"storage_vars", t.meta.storage_vars},
               {"tx_vars", t.meta.tx_vars}};
  if (t.is_violating()) {
    j["annotation_id"] = t.annotation_id;
    j["invalid_pc"] = t.invalid_pc;
  }
  return j;
}

}  // namespace annotary::traces
