#include "annotary/annotations/compile.hpp"

#include <cstdlib>

#include "annotary/evm/u256.hpp"
#include "annotary/support/subprocess.hpp"

#ifndef ANNOTARY_SOURCE_DIR
#define ANNOTARY_SOURCE_DIR "."
#endif

namespace annotary::annotations {

using nlohmann::json;

std::vector<SrcEntry> decode_srcmap(const std::string& srcmap) {
  std::vector<SrcEntry> out;
  SrcEntry cur;
  size_t pos = 0;
  while (pos <= srcmap.size()) {
    size_t semi = srcmap.find(';', pos);
    if (semi == std::string::npos) semi = srcmap.size();
    std::string entry = srcmap.substr(pos, semi - pos);

    // split on ':' keeping empty fields, which inherit the previous value
    std::vector<std::string> fields;
    size_t p = 0;
    while (true) {
      size_t colon = entry.find(':', p);
      if (colon == std::string::npos) {
        fields.push_back(entry.substr(p));
        break;
      }
      fields.push_back(entry.substr(p, colon - p));
      p = colon + 1;
    }
    if (fields.size() > 0 && !fields[0].empty()) cur.s = std::stoll(fields[0]);
    if (fields.size() > 1 && !fields[1].empty()) cur.l = std::stoll(fields[1]);
    if (fields.size() > 2 && !fields[2].empty()) cur.f = std::stoll(fields[2]);
    out.push_back(cur);

    if (semi == srcmap.size()) break;
    pos = semi + 1;
  }
  return out;
}

std::vector<std::string> default_solc_command(const std::string& override_path) {
  if (!override_path.empty()) return {"node", override_path};
  if (const char* env = std::getenv("ANNOTARY_SOLC_WRAPPER")) return {"node", env};
  return {"node", std::string(ANNOTARY_SOURCE_DIR) + "/tools/solc/solc_compile.js"};
}

Compiler::Compiler(std::vector<std::string> command) : command_(std::move(command)) {}

CompileArtifacts Compiler::compile(const std::map<std::string, std::string>& sources) const {
  json request;
  for (const auto& [file, text] : sources) request["sources"][file] = text;

  auto res = support::run_process(command_, request.dump());
  std::string joined_sources;
  for (const auto& [file, text] : sources) joined_sources += "// ---- " + file + "\n" + text;

  json out;
  try {
    out = json::parse(res.out);
  } catch (const json::exception& e) {
    throw CompileError("compiler wrapper produced unparsable output: " +
                           std::string(e.what()) + "\nstderr: " + res.err,
                       joined_sources);
  }

  CompileArtifacts arts;
  arts.compiler_version = out.value("compiler", "");
  for (const auto& d : out.value("errors", json::array()))
    arts.diagnostics.push_back(d.get<std::string>());
  if (res.exit_code != 0) {
    std::string msg = "compilation failed:";
    for (const auto& d : arts.diagnostics) msg += "\n" + d;
    throw CompileError(msg, joined_sources);
  }

  for (const auto& f : out.value("sourceList", json::array()))
    arts.source_list.push_back(f.get<std::string>());

  // bind before items(): iterating a temporary's items() dangles pre-C++23
  json contracts = out.value("contracts", json::object());
  for (auto& [key, c] : contracts.items()) {
    ContractArtifact art;
    art.name = key;
    auto bin = evm::parse_hex_bytes(c.value("bin", ""));
    auto bin_rt = evm::parse_hex_bytes(c.value("bin-runtime", ""));
    if (!bin || !bin_rt)
      throw CompileError("non-hex bytecode for " + key, joined_sources);
    art.bin = std::move(*bin);
    art.bin_runtime = std::move(*bin_rt);
    art.srcmap = c.value("srcmap", "");
    art.srcmap_runtime = c.value("srcmap-runtime", "");
    art.abi = c.value("abi", json::array());
    json hashes = c.value("functionHashes", json::object());
    for (auto& [sig, sel] : hashes.items())
      art.function_hashes[sig] = sel.get<std::string>();
    arts.contracts.emplace(key, std::move(art));
  }
  json srcs = out.value("sources", json::object());
  for (auto& [file, s] : srcs.items())
    arts.asts[file] = s.value("AST", json::object());
  return arts;
}

}  // namespace annotary::annotations
