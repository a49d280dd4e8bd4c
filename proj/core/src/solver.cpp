#include "annotary/solver/solver.hpp"

#include <cstdlib>
#include <regex>
#include <sstream>

#include "annotary/solver/smtlib.hpp"

#ifndef ANNOTARY_SOURCE_DIR
#define ANNOTARY_SOURCE_DIR "."
#endif

namespace annotary::solver {

std::vector<std::string> default_smt_command() {
  if (const char* env = std::getenv("ANNOTARY_SMT_SERVER"))
    return {"node", env};
  return {"node", std::string(ANNOTARY_SOURCE_DIR) + "/tools/smt/smt_server.mjs"};
}

Solver::Solver(std::vector<std::string> command, unsigned timeout_ms)
    : command_(std::move(command)), timeout_ms_(timeout_ms) {}

Solver::~Solver() = default;

void Solver::ensure_started() {
  if (proc_ && proc_->alive()) return;
  proc_ = std::make_unique<support::PipeProcess>(command_);
  // The worker announces readiness once the wasm runtime is up.
  for (;;) {
    std::string line = proc_->read_line();
    if (line == "@@READY@@") break;
  }
}

std::string Solver::roundtrip(const std::string& script) {
  ensure_started();
  std::istringstream in(script);
  std::string line;
  while (std::getline(in, line)) proc_->write_line(line);
  proc_->write_line("@@CHECK@@");
  std::string out;
  for (;;) {
    std::string l = proc_->read_line();
    if (l == "@@DONE@@") break;
    out += l;
    out += '\n';
  }
  return out;
}

CheckResult parse_solver_output(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  SatKind kind = SatKind::Unknown;
  bool found = false;
  while (std::getline(in, line)) {
    if (line == "sat") { kind = SatKind::Sat; found = true; break; }
    if (line == "unsat") { kind = SatKind::Unsat; found = true; break; }
    if (line == "unknown") { kind = SatKind::Unknown; found = true; break; }
  }
  if (!found)
    throw SolverBackendError("no verdict in solver output: " + text.substr(0, 200));

  CheckResult res;
  res.kind = kind;
  if (kind != SatKind::Sat) return res;

  Model model;
  static const std::regex def_re(
      R"(\(define-fun\s+(\|[^|]*\||[^\s()|]+)\s+\(\)\s*\(_\s+BitVec\s+256\)\s*#x([0-9a-fA-F]{64})\s*\))");
  auto begin = std::sregex_iterator(text.begin(), text.end(), def_re);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    std::string name = (*it)[1].str();
    if (name.size() >= 2 && name.front() == '|' && name.back() == '|')
      name = name.substr(1, name.size() - 2);
    model.assignments[name] = *evm::parse_u256("0x" + (*it)[2].str());
  }
  res.model = std::move(model);
  return res;
}

CheckResult Solver::check(const std::vector<evm::BoolTerm>& constraints) {
  // Literal contradictions and empty sets skip the backend entirely.
  bool any_false = false;
  for (const auto& c : constraints)
    if (c->is_false()) any_false = true;
  if (any_false) return {SatKind::Unsat, std::nullopt};

  std::string script = build_script(constraints, timeout_ms_);
  if (auto it = cache_.find(script); it != cache_.end()) {
    ++cache_hits_;
    return it->second;
  }
  ++queries_;
  std::string out;
  try {
    out = roundtrip(script);
  } catch (const support::ProcessError&) {
    if (restarted_once_)
      throw SolverBackendError("SMT worker died twice; giving up");
    restarted_once_ = true;
    proc_.reset();
    try {
      out = roundtrip(script);
    } catch (const support::ProcessError& e) {
      throw SolverBackendError(std::string("SMT worker unavailable: ") + e.what());
    }
  }
  CheckResult res;
  try {
    res = parse_solver_output(out);
  } catch (const SolverBackendError& e) {
    if (const char* dump = std::getenv("ANNOTARY_SMT_DEBUG")) {
      FILE* f = fopen(dump, "w");
      if (f) {
        fprintf(f, "=== script ===\n%s\n=== output ===\n%s\n", script.c_str(),
                out.c_str());
        fclose(f);
      }
    }
    throw;
  }
  cache_[script] = res;
  return res;
}

CheckResult Solver::check(const ConstraintSet& constraints) {
  return check(constraints.terms());
}

CheckResult Solver::check_with(const std::vector<evm::BoolTerm>& constraints,
                               const evm::BoolTerm& extra) {
  std::vector<evm::BoolTerm> all = constraints;
  all.push_back(extra);
  return check(all);
}

}  // namespace annotary::solver
