#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace annotary::annotations {

struct CompileError : std::runtime_error {
  // compiler diagnostics plus the exact source that produced them
  CompileError(const std::string& msg, std::string source)
      : std::runtime_error(msg), rewritten_source(std::move(source)) {}
  std::string rewritten_source;
};

// One `s:l:f` source-map entry per instruction.
struct SrcEntry {
  int64_t s = -1;  // byte offset
  int64_t l = -1;  // length
  int64_t f = -1;  // file index
};

// Decodes the semicolon-separated map with empty-field inheritance.
std::vector<SrcEntry> decode_srcmap(const std::string& srcmap);

struct ContractArtifact {
  std::string name;       // "file:Contract"
  std::vector<uint8_t> bin;
  std::vector<uint8_t> bin_runtime;
  std::string srcmap;
  std::string srcmap_runtime;
  nlohmann::json abi;
  std::map<std::string, std::string> function_hashes;  // sig -> 4-byte hex
};

struct CompileArtifacts {
  std::map<std::string, ContractArtifact> contracts;
  std::map<std::string, nlohmann::json> asts;  // file -> legacy AST
  std::vector<std::string> source_list;        // file-index order
  std::vector<std::string> diagnostics;        // warnings, non-fatal
  std::string compiler_version;
};

// Command line of the compiler wrapper; honors ANNOTARY_SOLC_WRAPPER,
// then an explicit override, then the in-tree wrapper script.
std::vector<std::string> default_solc_command(const std::string& override_path = {});

class Compiler {
 public:
  explicit Compiler(std::vector<std::string> command = default_solc_command());

  CompileArtifacts compile(const std::map<std::string, std::string>& sources) const;

 private:
  std::vector<std::string> command_;
};

}  // namespace annotary::annotations
