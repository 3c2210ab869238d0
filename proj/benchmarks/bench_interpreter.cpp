#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "wpsenv/script/interpreter.hpp"

using namespace wpsenv::script;

namespace {

const char* kLoop = R"(function main(n) {
  var total = 0;
  for (var i = 0; i < n; i = i + 1) {
    if (i % 3 == 0) { total = total + i; } else { total = total - 1; }
  }
  return total;
})";

const char* kCalls = R"(function fib(n) {
  if (n < 2) { return n; }
  return fib(n - 1) + fib(n - 2);
}
function main(n) { return fib(n); })";

void run_program(benchmark::State& state, const char* source) {
  auto prog = std::make_shared<const Program>(parse_source(source));
  std::uint64_t steps = 0;
  for (auto _ : state) {
    Interpreter in(prog, nullptr);
    auto r = in.run("main", {Value(static_cast<double>(state.range(0)))});
    steps += r.steps;
    benchmark::DoNotOptimize(r.value);
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}

void BM_Loop(benchmark::State& state) { run_program(state, kLoop); }
BENCHMARK(BM_Loop)->Arg(1000)->Arg(100000);

void BM_Recursion(benchmark::State& state) { run_program(state, kCalls); }
BENCHMARK(BM_Recursion)->Arg(15)->Arg(20);

void BM_Parse(benchmark::State& state) {
  std::string src;
  for (int i = 0; i < state.range(0); ++i)
    src += "function f" + std::to_string(i) + "(a, b) { var x = a * 2 + b; if (x > 3) { return [x, {k: x}]; } return x; }\n";
  for (auto _ : state) benchmark::DoNotOptimize(parse_source(src));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_Parse)->Arg(10)->Arg(1000);

}  // namespace
