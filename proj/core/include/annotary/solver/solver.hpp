#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "annotary/solver/constraints.hpp"
#include "annotary/support/subprocess.hpp"

namespace annotary::solver {

// Backend failure (process gone, protocol garbled). Distinct from a solver
// result of Unknown: Unknown is an answer, this is an analysis error.
struct SolverBackendError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Command line of the SMT worker process. Honors ANNOTARY_SMT_SERVER
// (path to the server script) before falling back to the copy that ships
// with the source tree.
std::vector<std::string> default_smt_command();

class Solver {
 public:
  explicit Solver(std::vector<std::string> command = default_smt_command(),
                  unsigned timeout_ms = 10000);
  ~Solver();

  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  CheckResult check(const std::vector<evm::BoolTerm>& constraints);
  CheckResult check(const ConstraintSet& constraints);

  // Convenience: sat of existing constraints plus one extra term.
  CheckResult check_with(const std::vector<evm::BoolTerm>& constraints,
                         const evm::BoolTerm& extra);

  unsigned timeout_ms() const { return timeout_ms_; }
  void set_timeout_ms(unsigned t) { timeout_ms_ = t; }
  size_t queries() const { return queries_; }
  size_t cache_hits() const { return cache_hits_; }

 private:
  void ensure_started();
  std::string roundtrip(const std::string& script);

  std::vector<std::string> command_;
  unsigned timeout_ms_;
  std::unique_ptr<support::PipeProcess> proc_;
  bool restarted_once_ = false;
  std::map<std::string, CheckResult> cache_;
  size_t queries_ = 0;
  size_t cache_hits_ = 0;
};

// Parses solver output: first non-empty line sat/unsat/unknown, then an
// optional model of 256-bit define-funs.
CheckResult parse_solver_output(const std::string& text);

}  // namespace annotary::solver
