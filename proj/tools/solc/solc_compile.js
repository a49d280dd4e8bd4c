// Compiles Solidity sources with the pinned 0.4-line compiler and emits a
// combined-JSON style document on stdout.
//
// Usage:
//   node solc_compile.js file.sol [more.sol ...]
//   node solc_compile.js            (reads {"sources":{name:content}} on stdin)
'use strict';

const fs = require('fs');
const solc = require('solc');

function readStdin() {
  return fs.readFileSync(0, 'utf8');
}

let sources = {};
if (process.argv.length > 2) {
  for (const file of process.argv.slice(2)) {
    sources[file] = fs.readFileSync(file, 'utf8');
  }
} else {
  const req = JSON.parse(readStdin());
  sources = req.sources || {};
}

const out = solc.compile({ sources }, 0);

const result = {
  compiler: solc.version(),
  sourceList: Object.keys(sources),
  contracts: {},
  sources: {},
  errors: out.errors || [],
};

for (const [key, c] of Object.entries(out.contracts || {})) {
  result.contracts[key] = {
    'bin': c.bytecode || '',
    'bin-runtime': c.runtimeBytecode || '',
    'srcmap': c.srcmap || '',
    'srcmap-runtime': c.srcmapRuntime || '',
    'abi': c.interface ? JSON.parse(c.interface) : [],
    'functionHashes': c.functionHashes || {},
  };
}
for (const [file, s] of Object.entries(out.sources || {})) {
  result.sources[file] = { AST: s.AST };
}

const fatal = result.errors.some((e) => /(^|\s|:)Error:/.test(e) || /ParserError/.test(e));
process.stdout.write(JSON.stringify(result));
process.exit(fatal ? 3 : 0);
