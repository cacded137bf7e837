#include <benchmark/benchmark.h>

#include "aota/adaptive_ota.hpp"
#include "aota/characterize.hpp"
#include "aota/engine.hpp"
#include "aota/netlist.hpp"

using namespace aota;

namespace {

std::string adaptive_netlist() {
    OtaTemplateParams t;
    t.bias.a = 0.75;
    return build_adaptive_ota(t);
}

void BM_Parse(benchmark::State& state) {
    const std::string text = adaptive_netlist();
    for (auto _ : state) benchmark::DoNotOptimize(parse(text));
}
BENCHMARK(BM_Parse);

void BM_OperatingPoint(benchmark::State& state) {
    const FlatCircuit fc = elaborate(parse(adaptive_netlist()));
    for (auto _ : state) benchmark::DoNotOptimize(dc_operating_point(fc));
}
BENCHMARK(BM_OperatingPoint);

void BM_AcSweep(benchmark::State& state) {
    const FlatCircuit fc = elaborate(parse(adaptive_netlist()));
    const OperatingPoint op = dc_operating_point(fc);
    for (auto _ : state) benchmark::DoNotOptimize(ac_analysis(fc, op, 1.0, 1e9, 20));
}
BENCHMARK(BM_AcSweep);

void BM_Transient(benchmark::State& state) {
    OtaTemplateParams t;
    t.include_testbench = false;
    const Characterizer ch(parse(build_adaptive_ota(t)), DutPorts{});
    PulseWaveform p{0.4, 1.6, 50e-9, 2e-9, 2e-9, 1e-6};
    const FlatCircuit fc = elaborate(ch.follower_bench(SourceSpec{p.v1, 0.0, 0.0, p}));
    for (auto _ : state) benchmark::DoNotOptimize(transient(fc, 1e-9, 2e-6));
}
BENCHMARK(BM_Transient)->Unit(benchmark::kMillisecond);

void BM_FullReport(benchmark::State& state) {
    OtaTemplateParams t;
    t.bias.a = 0.75;
    t.include_testbench = false;
    const Characterizer ch(parse(build_adaptive_ota(t)), DutPorts{});
    for (auto _ : state) benchmark::DoNotOptimize(ch.full_report());
}
BENCHMARK(BM_FullReport)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
