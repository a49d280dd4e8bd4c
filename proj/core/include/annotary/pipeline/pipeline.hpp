#pragma once

// End-to-end orchestration: parse annotations, rewrite, compile, execute
// constructor and message transactions, extract traces, find and classify
// violations, and assemble the machine-readable report.

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace annotary::pipeline {

constexpr int kSchemaVersion = 1;

struct AnalysisConfig {
  // Source mode: Solidity files.
  std::vector<std::string> sources;

  // Bytecode-direct mode: hex files plus a layout/selector description and
  // an annotation sidecar. Only write-restriction annotations apply here;
  // assert-style annotations need source to instrument.
  std::string bytecode_runtime;
  std::string bytecode_creation;
  std::string layout_file;
  std::string annotations_file;

  int max_chain_depth = 3;
  uint64_t max_jumps = 1ull << 14;
  bool chaining_enabled = true;
  unsigned solver_timeout_ms = 10000;
  std::string solc_path;   // compiler wrapper override
  std::string rpc_url;     // optional node endpoint for concrete resolution
  std::string json_output; // write the report here when non-empty

  bool bytecode_mode() const { return !bytecode_runtime.empty(); }
  void validate() const;  // throws AnalysisError on an inconsistent config
};

// Phase-tagged analysis failure; maps to exit code 2.
struct AnalysisError : std::runtime_error {
  AnalysisError(std::string phase_, const std::string& msg)
      : std::runtime_error(phase_ + ": " + msg), phase(std::move(phase_)) {}
  std::string phase;
};

struct Report {
  nlohmann::json doc;
  int exit_code = 0;  // 0: all annotations hold, 1: violations found
};

Report run(const AnalysisConfig& cfg);

// key=value lines; '#' starts a comment; keys mirror the CLI flags.
void apply_config_file(AnalysisConfig& cfg, const std::string& path);

}  // namespace annotary::pipeline
