#include "annotary/pipeline/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include "annotary/annotations/annotation.hpp"
#include "annotary/annotations/ast.hpp"
#include "annotary/annotations/compile.hpp"
#include "annotary/annotations/labeling.hpp"
#include "annotary/annotations/layout.hpp"
#include "annotary/annotations/rewrite.hpp"
#include "annotary/chain/client.hpp"
#include "annotary/evm/instruction.hpp"
#include "annotary/symexec/explorer.hpp"
#include "annotary/traces/trace.hpp"
#include "annotary/violations/violations.hpp"

namespace annotary::pipeline {

using annotations::Annotation;
using annotations::AnnotationKind;
using annotations::CompileArtifacts;
using annotations::Compiler;
using annotations::ContractArtifact;
using annotations::StorageLayout;
using evm::u256;
using evm::Word;
using nlohmann::json;
using solver::Provenance;
using symexec::Explorer;
using symexec::StateSpace;
using symexec::TxMeta;
using traces::TraceKind;
using traces::TransactionTrace;
using violations::ConfidenceLevel;
using violations::Violation;

namespace {

constexpr u256 kAnalysisAddress = 0xa11;

std::string read_file(const std::string& path, const char* phase) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AnalysisError(phase, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Timings {
  std::map<std::string, double> ms;

  template <typename F>
  auto phase(const std::string& name, F&& f) {
    auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      ms[name] += std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    } else {
      auto out = f();
      ms[name] += std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
      return out;
    }
  }
};

void merge_space(StateSpace& into, StateSpace&& from) {
  for (auto& t : from.terminals) into.terminals.push_back(std::move(t));
  into.states_explored += from.states_explored;
  into.states_pruned += from.states_pruned;
  into.visited.insert(from.visited.begin(), from.visited.end());
  for (auto& [id, offs] : from.instruction_offsets)
    into.instruction_offsets[id].insert(offs.begin(), offs.end());
  for (auto& w : from.warnings) into.warnings.push_back(std::move(w));
}

// selector == <sel> over the first calldata word, phrased the way the
// dispatcher computes it so the constraint prunes every other function.
evm::BoolTerm selector_equals(const std::string& tag, uint32_t sel) {
  Word cd0 = evm::symbol("calldata_" + tag + "_0", evm::SymOrigin::Calldata);
  Word expr = evm::w_and(evm::w_div(cd0, evm::concrete(u256(1) << 224)),
                         evm::concrete(0xffffffffu));
  return evm::b_eq(expr, evm::concrete(u256(sel)));
}

evm::BoolTerm calldata_holds_selector(const std::string& tag) {
  Word size = evm::symbol("calldatasize_" + tag, evm::SymOrigin::Calldata);
  return evm::b_not(evm::b_ult(size, evm::concrete(4)));
}

std::map<uint32_t, std::string> selector_map(const ContractArtifact& art) {
  std::map<uint32_t, std::string> out;
  for (const auto& [sig, hex] : art.function_hashes)
    out[static_cast<uint32_t>(std::stoul(hex, nullptr, 16))] = sig;
  return out;
}

// One discovered violation with enough context to report it.
struct Finding {
  std::string file;      // empty in bytecode mode
  std::string contract;
  Violation v;
};

bool counts_as_violated(ConfidenceLevel level) {
  return level == ConfidenceLevel::SingleTransaction ||
         level == ConfidenceLevel::ChainedTransaction ||
         level == ConfidenceLevel::Constructed ||
         level == ConfidenceLevel::Unconfirmed;
}

json model_json(const solver::Model& m) {
  json out = json::object();
  for (const auto& [name, value] : m.assignments)
    out[name] = "0x" + evm::to_hex(value);
  return out;
}

std::vector<std::string> function_chain(const Violation& v) {
  // the final chain element is the combined trace and already carries the
  // whole executed function sequence
  std::vector<std::string> out;
  if (!v.chain.empty())
    out = v.chain.back().meta.functions;
  else
    out = v.trace.meta.functions;
  if (out.empty() && !v.function.empty()) out.push_back(v.function);
  return out;
}

json finding_json(const Finding& f) {
  json out{{"contract", f.contract},
           {"level", violations::to_string(f.v.level)},
           {"pc", f.v.pc},
           {"function_chain", function_chain(f.v)},
           {"persisted", f.v.persisted}};
  if (!f.v.member.empty()) out["member"] = f.v.member;
  if (!f.v.note.empty()) out["note"] = f.v.note;
  if (f.v.model) out["model"] = model_json(*f.v.model);
  return out;
}

// Shared per-contract machinery once a runtime/creation space pair exists.
struct ContractRun {
  StateSpace msg_space;
  StateSpace ctor_space;
  std::vector<TransactionTrace> tm, tc;
  std::vector<TransactionTrace> violating_msg, violating_ctor;

  void extract(solver::Solver& solver) {
    for (auto& t : traces::extract_traces(msg_space, kAnalysisAddress, solver))
      (t.is_violating() ? violating_msg : tm).push_back(std::move(t));
    for (auto& t : traces::extract_traces(ctor_space, kAnalysisAddress, solver))
      (t.is_violating() ? violating_ctor : tc).push_back(std::move(t));
  }

  void classify(std::vector<Violation>& vs, const AnalysisConfig& cfg,
                solver::Solver& solver) {
    int depth = cfg.chaining_enabled ? cfg.max_chain_depth : 0;
    for (Violation& v : vs) {
      if (v.level != ConfidenceLevel::Unconfirmed) continue;
      auto res = violations::check_severity(v.trace, tc, tm, depth,
                                            /*pref_ind=*/true, solver);
      v.level = res.level;
      v.chain = std::move(res.chain);
    }
  }
};

// Explores the runtime dispatcher once per external function plus the
// fallback; unseeded when no selectors are known.
StateSpace explore_messages(Explorer& ex, const evm::CodeRef& code,
                            const std::string& tag_base,
                            const std::map<uint32_t, std::string>& selmap) {
  StateSpace merged;
  if (selmap.empty()) {
    TxMeta m;
    m.instance_tag = tag_base + "_msg";
    merge_space(merged, ex.exec_message(code, kAnalysisAddress, m));
    return merged;
  }
  for (const auto& [sel, sig] : selmap) {
    TxMeta m;
    m.instance_tag = tag_base + "_" + evm::to_hex(u256(sel));
    m.function_signature = sig;
    m.selector = sel;
    auto st = std::make_shared<symexec::GlobalState>(
        ex.make_message_state(code, kAnalysisAddress, m));
    st->constraints.add(calldata_holds_selector(m.instance_tag),
                        Provenance::Environment);
    st->constraints.add(selector_equals(m.instance_tag, sel),
                        Provenance::Environment);
    merge_space(merged, ex.explore(std::move(st)));
  }
  {
    // default function: short calldata or an unknown selector
    TxMeta m;
    m.instance_tag = tag_base + "_fb";
    auto st = std::make_shared<symexec::GlobalState>(
        ex.make_message_state(code, kAnalysisAddress, m));
    evm::BoolTerm unknown = evm::b_not(calldata_holds_selector(m.instance_tag));
    evm::BoolTerm no_match = evm::b_true();
    for (const auto& [sel, sig] : selmap)
      no_match =
          evm::b_and(no_match, evm::b_not(selector_equals(m.instance_tag, sel)));
    st->constraints.add(evm::b_or(unknown, no_match), Provenance::Environment);
    merge_space(merged, ex.explore(std::move(st)));
  }
  return merged;
}

json space_stats(const StateSpace& msg_space, const StateSpace& ctor_space,
                 uint64_t runtime_id, uint64_t creation_id) {
  size_t total = 0, hit = 0;
  auto it = msg_space.instruction_offsets.find(runtime_id);
  if (it != msg_space.instruction_offsets.end()) {
    total = it->second.size();
    for (uint32_t off : it->second)
      if (msg_space.visited.count({runtime_id, off})) ++hit;
  }
  return json{{"coverage", msg_space.coverage(runtime_id)},
              {"constructor_coverage", ctor_space.coverage(creation_id)},
              {"instructions_total", total},
              {"instructions_visited", hit},
              {"states_explored",
               msg_space.states_explored + ctor_space.states_explored},
              {"states_pruned",
               msg_space.states_pruned + ctor_space.states_pruned}};
}

}  // namespace

void AnalysisConfig::validate() const {
  bool source_mode = !sources.empty();
  if (source_mode && bytecode_mode())
    throw AnalysisError("config",
                        "source files and bytecode inputs are exclusive");
  if (!source_mode && !bytecode_mode())
    throw AnalysisError("config", "no inputs given");
  if (bytecode_mode()) {
    if (bytecode_creation.empty() || layout_file.empty() ||
        annotations_file.empty())
      throw AnalysisError("config",
                          "bytecode mode needs runtime, creation, layout, and "
                          "annotation files");
  }
  if (max_chain_depth < 0)
    throw AnalysisError("config", "max_chain_depth must be non-negative");
}

void apply_config_file(AnalysisConfig& cfg, const std::string& path) {
  std::string text = read_file(path, "config");
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto strip = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw AnalysisError("config", path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));

    auto as_uint = [&](const std::string& v) -> uint64_t {
      try {
        return std::stoull(v);
      } catch (...) {
        throw AnalysisError("config", path + ": bad number for " + key);
      }
    };
    if (key == "input")
      cfg.sources.push_back(value);
    else if (key == "max_depth")
      cfg.max_chain_depth = static_cast<int>(as_uint(value));
    else if (key == "max_jumps")
      cfg.max_jumps = as_uint(value);
    else if (key == "chaining")
      cfg.chaining_enabled = value == "true" || value == "1" || value == "on";
    else if (key == "solver_timeout_ms")
      cfg.solver_timeout_ms = static_cast<unsigned>(as_uint(value));
    else if (key == "solc")
      cfg.solc_path = value;
    else if (key == "rpc_url")
      cfg.rpc_url = value;
    else if (key == "json")
      cfg.json_output = value;
    else if (key == "bytecode_runtime")
      cfg.bytecode_runtime = value;
    else if (key == "bytecode_creation")
      cfg.bytecode_creation = value;
    else if (key == "layout")
      cfg.layout_file = value;
    else if (key == "annotations")
      cfg.annotations_file = value;
    else
      throw AnalysisError("config", path + ": unknown key " + key);
  }
}

namespace {

Report assemble_report(
    const AnalysisConfig& cfg,
    const std::vector<std::pair<std::string, Annotation>>& annotations,
    const std::vector<Finding>& findings, const json& contracts,
    std::vector<std::string> warnings, Timings& timings) {
  json doc;
  doc["schema_version"] = kSchemaVersion;

  std::set<std::pair<std::string, int>> violated;
  for (const Finding& f : findings)
    if (counts_as_violated(f.v.level)) violated.insert({f.file, f.v.annotation_id});

  json anns = json::array();
  for (const auto& [file, ann] : annotations) {
    const char* kind = ann.kind == AnnotationKind::Check       ? "check"
                       : ann.kind == AnnotationKind::Never     ? "never"
                       : ann.kind == AnnotationKind::Invariant ? "invariant"
                                                               : "set_restricted";
    json a{{"id", ann.id},
           {"file", file},
           {"line", ann.line},
           {"kind", kind},
           {"status",
            violated.count({file, ann.id}) ? "violated" : "holds"}};
    if (!ann.expr_text.empty()) a["expression"] = ann.expr_text;
    json vs = json::array();
    for (const Finding& f : findings)
      if (f.file == file && f.v.annotation_id == ann.id)
        vs.push_back(finding_json(f));
    a["violations"] = std::move(vs);
    anns.push_back(std::move(a));
  }
  doc["annotations"] = std::move(anns);
  doc["contracts"] = contracts;
  doc["warnings"] = warnings;
  json t = json::object();
  for (const auto& [name, ms] : timings.ms) t[name] = ms;
  doc["timings_ms"] = std::move(t);

  bool any = !violated.empty();
  doc["status"] = any ? "violated" : "holds";

  Report rep;
  rep.doc = std::move(doc);
  rep.exit_code = any ? 1 : 0;

  if (!cfg.json_output.empty()) {
    std::ofstream out(cfg.json_output, std::ios::binary);
    if (!out)
      throw AnalysisError("report", "cannot write " + cfg.json_output);
    out << rep.doc.dump(2) << "\n";
  }
  return rep;
}

Report run_source_mode(const AnalysisConfig& cfg) {
  Timings timings;
  std::vector<std::string> warnings;

  std::map<std::string, std::string> sources;
  for (const auto& path : cfg.sources)
    sources[path] = read_file(path, "input");

  // parse annotations per file
  std::map<std::string, annotations::ParsedAnnotations> parsed;
  std::vector<std::pair<std::string, Annotation>> all_annotations;
  timings.phase("parse", [&] {
    for (const auto& [file, text] : sources) {
      parsed[file] = annotations::parse_annotations(text, file);
      for (const auto& d : parsed[file].diagnostics)
        warnings.push_back(file + ":" + std::to_string(d.line) +
                           ": malformed annotation: " + d.message);
      for (const auto& a : parsed[file].annotations)
        all_annotations.emplace_back(file, a);
    }
  });

  Compiler compiler(annotations::default_solc_command(cfg.solc_path));
  CompileArtifacts arts = timings.phase("compile", [&] {
    try {
      return compiler.compile(sources);
    } catch (const annotations::CompileError& e) {
      throw AnalysisError("compile", e.what());
    }
  });
  for (const auto& d : arts.diagnostics) warnings.push_back(d);

  std::map<std::string, annotations::AstFile> asts;
  for (const auto& [file, ast_json] : arts.asts)
    asts[file] = annotations::parse_ast(ast_json);

  // rewrite and recompile
  std::map<std::string, annotations::RewriteResult> rewrites;
  std::map<std::string, std::string> instrumented;
  timings.phase("rewrite", [&] {
    for (const auto& [file, text] : sources) {
      rewrites[file] =
          annotations::rewrite_source(text, parsed[file], asts[file]);
      for (const auto& w : rewrites[file].warnings)
        warnings.push_back(file + ": " + w);
      instrumented[file] = rewrites[file].rewritten_source;
    }
  });
  CompileArtifacts arts2 = timings.phase("recompile", [&] {
    try {
      return compiler.compile(instrumented);
    } catch (const annotations::CompileError& e) {
      throw AnalysisError("recompile",
                          std::string("instrumented source rejected: ") +
                              e.what());
    }
  });

  solver::Solver solver(solver::default_smt_command(), cfg.solver_timeout_ms);
  symexec::ExplorationBounds bounds;
  bounds.max_jumps = cfg.max_jumps;
  Explorer ex(solver, bounds);

  std::unique_ptr<chain::ChainClient> chain_client;
  if (!cfg.rpc_url.empty()) {
    chain_client = std::make_unique<chain::ChainClient>(
        chain::EndpointOptions{cfg.rpc_url});
    ex.set_code_resolver([&](const u256& address) -> evm::CodeRef {
      auto code = chain_client->get_code(address);
      if (!code || code->empty()) return nullptr;  // wallet or unresolvable
      return ex.register_code(*code, "chain:" + chain::address_hex(address));
    });
  }

  std::vector<Finding> findings;
  json contracts = json::array();

  for (const auto& [key, art] : arts2.contracts) {
    if (art.bin_runtime.empty()) continue;  // abstract contract or interface
    auto colon = key.rfind(':');
    std::string file = key.substr(0, colon);
    std::string name = key.substr(colon + 1);
    int64_t source_index = -1;
    for (size_t i = 0; i < arts2.source_list.size(); ++i)
      if (arts2.source_list[i] == file) source_index = static_cast<int64_t>(i);
    if (source_index < 0) continue;

    StorageLayout layout;
    if (const auto* c = asts[file].contract_by_name(name))
      layout = annotations::derive_layout(asts[file], *c);
    auto selmap = selector_map(art);

    ContractRun run;
    auto rcode = ex.register_code(art.bin_runtime, key + ":runtime");
    auto ccode = ex.register_code(art.bin, key + ":creation");
    timings.phase("execute", [&] {
      run.msg_space = explore_messages(ex, rcode, name, selmap);
      TxMeta cm;
      cm.instance_tag = name + "_ctor";
      run.ctor_space = ex.exec_constructor(ccode, kAnalysisAddress, cm);
    });
    timings.phase("label", [&] {
      annotations::label_states(run.msg_space, rcode->id,
                                evm::decode(art.bin_runtime),
                                annotations::decode_srcmap(art.srcmap_runtime),
                                rewrites[file].ranges, source_index);
      annotations::label_states(run.ctor_space, ccode->id,
                                evm::decode(art.bin),
                                annotations::decode_srcmap(art.srcmap),
                                rewrites[file].ranges, source_index);
    });
    timings.phase("extract", [&] { run.extract(solver); });

    std::vector<Violation> vs;
    timings.phase("violations", [&] {
      vs = violations::find_assert_violations(run.violating_msg, solver);
      for (Violation& v : vs)
        v.persisted = violations::confirm_persistence(run.msg_space, v, solver);
      auto ctor_vs =
          violations::find_assert_violations(run.violating_ctor, solver);
      for (Violation& v : ctor_vs) {
        v.persisted =
            violations::confirm_persistence(run.ctor_space, v, solver);
        vs.push_back(std::move(v));
      }
      for (const Annotation& ann : parsed[file].annotations) {
        if (ann.kind != AnnotationKind::SetRestricted) continue;
        for (auto& v : violations::find_set_restricted_violations(
                 run.msg_space, ann, layout, selmap, solver))
          vs.push_back(std::move(v));
        for (auto& v : violations::find_set_restricted_violations(
                 run.ctor_space, ann, layout, selmap, solver))
          vs.push_back(std::move(v));
      }
    });
    timings.phase("severity", [&] { run.classify(vs, cfg, solver); });

    for (Violation& v : vs)
      findings.push_back({file, key, std::move(v)});

    json cj = space_stats(run.msg_space, run.ctor_space, rcode->id, ccode->id);
    cj["name"] = key;
    cj["message_traces"] = run.tm.size();
    cj["constructor_traces"] = run.tc.size();
    cj["violating_traces"] =
        run.violating_msg.size() + run.violating_ctor.size();
    for (const auto& w : run.msg_space.warnings) warnings.push_back(w);
    for (const auto& w : run.ctor_space.warnings) warnings.push_back(w);
    contracts.push_back(std::move(cj));
  }

  return assemble_report(cfg, all_annotations, findings, contracts,
                         std::move(warnings), timings);
}

annotations::SlotKind slot_kind_from(const std::string& s, const char* phase) {
  using annotations::SlotKind;
  if (s == "scalar") return SlotKind::Scalar;
  if (s == "mapping") return SlotKind::Mapping;
  if (s == "dynamic_array") return SlotKind::DynamicArray;
  if (s == "static_array") return SlotKind::StaticArray;
  if (s == "struct") return SlotKind::Struct;
  throw AnalysisError(phase, "unknown slot kind: " + s);
}

Report run_bytecode_mode(const AnalysisConfig& cfg) {
  Timings timings;
  std::vector<std::string> warnings;

  auto runtime_bytes =
      evm::parse_hex_bytes(read_file(cfg.bytecode_runtime, "input"));
  auto creation_bytes =
      evm::parse_hex_bytes(read_file(cfg.bytecode_creation, "input"));
  if (!runtime_bytes || !creation_bytes)
    throw AnalysisError("input", "malformed bytecode hex");

  json layout_doc =
      json::parse(read_file(cfg.layout_file, "input"), nullptr, false);
  if (layout_doc.is_discarded())
    throw AnalysisError("input", "malformed layout JSON");

  StorageLayout layout;
  json members = layout_doc.value("members", json::object());
  for (const auto& [mname, spec] : members.items()) {
    annotations::MemberSlot slot;
    slot.slot = spec.value("slot", 0);
    slot.slot_count = spec.value("slot_count", 1);
    slot.kind = slot_kind_from(spec.value("kind", "scalar"), "input");
    layout.members[mname] = slot;
  }
  std::map<uint32_t, std::string> selmap;
  json funcs = layout_doc.value("functions", json::object());
  for (const auto& [sig, sel] : funcs.items())
    selmap[static_cast<uint32_t>(
        std::stoul(sel.get<std::string>(), nullptr, 16))] = sig;

  std::string sidecar = read_file(cfg.annotations_file, "input");
  auto parsed = annotations::parse_annotations(sidecar, cfg.annotations_file);
  for (const auto& d : parsed.diagnostics)
    warnings.push_back(cfg.annotations_file + ":" + std::to_string(d.line) +
                       ": malformed annotation: " + d.message);
  std::vector<std::pair<std::string, Annotation>> all_annotations;
  for (const auto& a : parsed.annotations)
    all_annotations.emplace_back(cfg.annotations_file, a);

  solver::Solver solver(solver::default_smt_command(), cfg.solver_timeout_ms);
  symexec::ExplorationBounds bounds;
  bounds.max_jumps = cfg.max_jumps;
  Explorer ex(solver, bounds);

  ContractRun run;
  auto rcode = ex.register_code(*runtime_bytes, "bytecode:runtime");
  auto ccode = ex.register_code(*creation_bytes, "bytecode:creation");
  timings.phase("execute", [&] {
    run.msg_space = explore_messages(ex, rcode, "bc", selmap);
    TxMeta cm;
    cm.instance_tag = "bc_ctor";
    run.ctor_space = ex.exec_constructor(ccode, kAnalysisAddress, cm);
  });
  timings.phase("extract", [&] { run.extract(solver); });

  std::vector<Finding> findings;
  std::vector<Violation> vs;
  timings.phase("violations", [&] {
    for (const Annotation& ann : parsed.annotations) {
      if (ann.kind != AnnotationKind::SetRestricted) {
        warnings.push_back(
            cfg.annotations_file + ":" + std::to_string(ann.line) +
            ": assert-style annotations need source input; ignored");
        continue;
      }
      for (auto& v : violations::find_set_restricted_violations(
               run.msg_space, ann, layout, selmap, solver))
        vs.push_back(std::move(v));
      for (auto& v : violations::find_set_restricted_violations(
               run.ctor_space, ann, layout, selmap, solver))
        vs.push_back(std::move(v));
    }
  });
  timings.phase("severity", [&] { run.classify(vs, cfg, solver); });
  for (Violation& v : vs)
    findings.push_back({cfg.annotations_file, "bytecode", std::move(v)});

  json contracts = json::array();
  json cj = space_stats(run.msg_space, run.ctor_space, rcode->id, ccode->id);
  cj["name"] = "bytecode";
  cj["message_traces"] = run.tm.size();
  cj["constructor_traces"] = run.tc.size();
  cj["violating_traces"] = run.violating_msg.size() + run.violating_ctor.size();
  contracts.push_back(std::move(cj));
  for (const auto& w : run.msg_space.warnings) warnings.push_back(w);

  return assemble_report(cfg, all_annotations, findings, contracts,
                         std::move(warnings), timings);
}

}  // namespace

Report run(const AnalysisConfig& cfg) {
  cfg.validate();
  try {
    return cfg.bytecode_mode() ? run_bytecode_mode(cfg) : run_source_mode(cfg);
  } catch (const AnalysisError&) {
    throw;
  } catch (const std::exception& e) {
    throw AnalysisError("analysis", e.what());
  }
}

}  // namespace annotary::pipeline
