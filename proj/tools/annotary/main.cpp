// Command-line front end: collects the analysis configuration from flags
// and an optional key=value config file, runs the pipeline, prints a
// summary, and maps the outcome onto the exit-code contract
// (0 holds, 1 violations, 2 analysis error).

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "annotary/pipeline/pipeline.hpp"

using annotary::pipeline::AnalysisConfig;
using annotary::pipeline::AnalysisError;

namespace {

void print_summary(const nlohmann::json& doc) {
  std::cout << "status: " << doc.value("status", "?") << "\n";
  for (const auto& ann : doc.value("annotations", nlohmann::json::array())) {
    std::cout << "  " << ann.value("file", "") << ":" << ann.value("line", 0)
              << " @" << ann.value("kind", "") << " -> "
              << ann.value("status", "") << "\n";
    for (const auto& v : ann.value("violations", nlohmann::json::array())) {
      std::cout << "    [" << v.value("level", "") << "] "
                << v.value("contract", "");
      auto chain = v.value("function_chain", nlohmann::json::array());
      if (!chain.empty()) {
        std::cout << " via";
        for (const auto& f : chain) std::cout << " " << f.get<std::string>();
      }
      std::cout << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"annotation-driven concolic analyzer for Ethereum contracts"};

  AnalysisConfig cfg;
  std::string config_file;
  bool no_chaining = false;

  app.add_option("inputs", cfg.sources, "Solidity source files");
  app.add_option("--config", config_file, "key=value configuration file");
  app.add_option("--max-depth", cfg.max_chain_depth,
                 "transaction chain depth budget");
  app.add_option("--max-jumps", cfg.max_jumps, "jump budget per path");
  app.add_flag("--no-chaining", no_chaining,
               "classify violations without chaining transactions");
  app.add_option("--solver-timeout-ms", cfg.solver_timeout_ms,
                 "per-query SMT timeout");
  app.add_option("--solc", cfg.solc_path, "compiler wrapper override");
  app.add_option("--rpc-url", cfg.rpc_url,
                 "Ethereum JSON-RPC endpoint for concrete resolution");
  app.add_option("--json", cfg.json_output, "write the JSON report here");
  app.add_option("--bytecode-runtime", cfg.bytecode_runtime,
                 "runtime bytecode hex file (bytecode mode)");
  app.add_option("--bytecode-creation", cfg.bytecode_creation,
                 "creation bytecode hex file (bytecode mode)");
  app.add_option("--layout", cfg.layout_file,
                 "storage layout JSON (bytecode mode)");
  app.add_option("--annotations", cfg.annotations_file,
                 "annotation sidecar (bytecode mode)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_file.empty()) {
      // flags already parsed win over config-file values only for
      // unset-by-file keys; the file is applied on top of defaults first,
      // so re-parse flags afterwards for precedence
      AnalysisConfig file_cfg;
      annotary::pipeline::apply_config_file(file_cfg, config_file);
      // merge: flag-provided values (non-default) keep priority
      if (cfg.sources.empty()) cfg.sources = file_cfg.sources;
      if (app.count("--max-depth") == 0)
        cfg.max_chain_depth = file_cfg.max_chain_depth;
      if (app.count("--max-jumps") == 0) cfg.max_jumps = file_cfg.max_jumps;
      if (app.count("--no-chaining") == 0)
        cfg.chaining_enabled = file_cfg.chaining_enabled;
      if (app.count("--solver-timeout-ms") == 0)
        cfg.solver_timeout_ms = file_cfg.solver_timeout_ms;
      if (cfg.solc_path.empty()) cfg.solc_path = file_cfg.solc_path;
      if (cfg.rpc_url.empty()) cfg.rpc_url = file_cfg.rpc_url;
      if (cfg.json_output.empty()) cfg.json_output = file_cfg.json_output;
      if (cfg.bytecode_runtime.empty())
        cfg.bytecode_runtime = file_cfg.bytecode_runtime;
      if (cfg.bytecode_creation.empty())
        cfg.bytecode_creation = file_cfg.bytecode_creation;
      if (cfg.layout_file.empty()) cfg.layout_file = file_cfg.layout_file;
      if (cfg.annotations_file.empty())
        cfg.annotations_file = file_cfg.annotations_file;
    }
    if (no_chaining) cfg.chaining_enabled = false;

    auto report = annotary::pipeline::run(cfg);
    print_summary(report.doc);
    return report.exit_code;
  } catch (const AnalysisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: analysis: " << e.what() << "\n";
    return 2;
  }
}
