#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "annotary/evm/term.hpp"

namespace annotary::solver {

struct SmtPrintError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// SMT-LIB v2 rendering over fixed-width 256-bit vectors.
std::string to_smtlib(const evm::Word& w);
std::string to_smtlib(const evm::BoolTerm& b);

// Full script: options, declarations for every symbol occurring in the
// terms, one assert per term, (check-sat) and (get-model).
std::string build_script(const std::vector<evm::BoolTerm>& constraints,
                         unsigned timeout_ms);

}  // namespace annotary::solver
