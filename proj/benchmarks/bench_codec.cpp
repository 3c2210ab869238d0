#include <benchmark/benchmark.h>

#include "wpsenv/wps/codec.hpp"

using namespace wpsenv::wps;

namespace {

ExecuteRequest sample_request(int inputs) {
  ExecuteRequest r;
  r.process_id = "road2grid";
  for (int i = 0; i < inputs; ++i) {
    auto id = "in" + std::to_string(i);
    switch (i % 3) {
      case 0: r.inputs.emplace_back(id, LiteralVal{"12.5 & <more>"}); break;
      case 1: r.inputs.emplace_back(id, ComplexRef{"http://127.0.0.1:8080/files/tok" + std::to_string(i), "text/plain"}); break;
      default: r.inputs.emplace_back(id, ComplexInline{std::string(256, 'x'), "text/plain"});
    }
  }
  r.response_form.store_results = true;
  r.response_form.status = true;
  return r;
}

void BM_EncodeExecute(benchmark::State& state) {
  auto req = sample_request(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(encode_execute(req));
}
BENCHMARK(BM_EncodeExecute)->Arg(3)->Arg(30)->Arg(300);

void BM_DecodeExecute(benchmark::State& state) {
  auto xml = encode_execute(sample_request(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(decode_execute(xml));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * xml.size()));
}
BENCHMARK(BM_DecodeExecute)->Arg(3)->Arg(30)->Arg(300);

void BM_ParseExecuteResponse(benchmark::State& state) {
  ExecuteResponse resp;
  resp.process_id = "g_sum";
  resp.status.state = Started{40};
  resp.status_location = "http://h/wps/status/abc";
  for (int i = 0; i < 10; ++i) resp.outputs.emplace_back("o" + std::to_string(i), LiteralVal{"v"});
  auto xml = encode_execute_response(resp);
  for (auto _ : state) benchmark::DoNotOptimize(parse_execute_response(xml));
}
BENCHMARK(BM_ParseExecuteResponse);

}  // namespace
BENCHMARK_MAIN();
