#include <benchmark/benchmark.h>

#include "annotary/evm/instruction.hpp"
#include "annotary/evm/keccak.hpp"
#include "annotary/evm/term.hpp"

using namespace annotary::evm;

static void BM_Keccak256(benchmark::State& state) {
  std::vector<uint8_t> data(static_cast<size_t>(state.range(0)), 0xab);
  for (auto _ : state) benchmark::DoNotOptimize(keccak256(data));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Keccak256)->Arg(32)->Arg(64)->Arg(1024);

static void BM_Decode(benchmark::State& state) {
  std::vector<uint8_t> code;
  for (int i = 0; i < state.range(0); ++i) {
    code.push_back(0x60);  // PUSH1
    code.push_back(0x01);
    code.push_back(0x01);  // ADD
  }
  for (auto _ : state) benchmark::DoNotOptimize(decode(code));
}
BENCHMARK(BM_Decode)->Arg(100)->Arg(1000);

static void BM_TermBuild(benchmark::State& state) {
  for (auto _ : state) {
    Word x = symbol("x", SymOrigin::Fresh);
    Word acc = concrete(0);
    for (int i = 0; i < state.range(0); ++i)
      acc = w_add(acc, w_mul(x, concrete(i + 1)));
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_TermBuild)->Arg(16)->Arg(128);

static void BM_Simplify(benchmark::State& state) {
  Word x = symbol("x", SymOrigin::Fresh);
  Word t = x;
  for (int i = 0; i < 64; ++i) t = w_add(t, concrete(1));
  for (auto _ : state) benchmark::DoNotOptimize(simplify(t));
}
BENCHMARK(BM_Simplify);

BENCHMARK_MAIN();
