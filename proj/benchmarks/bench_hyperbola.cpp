#include <benchmark/benchmark.h>

#include "fracwalk/hyperbola.hpp"

namespace {

using fracwalk::Modulus;

void BM_CountSolutions(benchmark::State& state) {
    const Modulus m(static_cast<std::uint64_t>(state.range(0)));
    const std::uint64_t len = m.value() / 4;
    const fracwalk::Interval i(0, len, m), j(len, len, m);
    for (auto _ : state) benchmark::DoNotOptimize(fracwalk::count_solutions(i, j, m));
}
BENCHMARK(BM_CountSolutions)->Arg(1009)->Arg(100003);

void BM_ScanMaxRatio(benchmark::State& state) {
    const Modulus m(static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fracwalk::scan_max_ratio(m, m.value() / 4));
}
BENCHMARK(BM_ScanMaxRatio)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);

}  // namespace
