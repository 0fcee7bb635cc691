#include <benchmark/benchmark.h>

#include "fracwalk/kernels.hpp"
#include "fracwalk/mixing.hpp"

namespace {

using fracwalk::Modulus;
using fracwalk::StepDist;

void BM_Evolve(benchmark::State& state) {
    const Modulus m(static_cast<std::uint64_t>(state.range(0)));
    const auto k = fracwalk::walk_kernel(StepDist::uniform({0, 1}), m);
    const auto start = fracwalk::Dist::point(k.space(), 0);
    for (auto _ : state) benchmark::DoNotOptimize(fracwalk::evolve(k, start, 64));
}
BENCHMARK(BM_Evolve)->Arg(101)->Arg(1009)->Arg(10007);

void BM_MixingTimeWorstCase(benchmark::State& state) {
    const Modulus m(static_cast<std::uint64_t>(state.range(0)));
    const auto k = fracwalk::walk_kernel(StepDist::uniform({0, 1}), m);
    for (auto _ : state) benchmark::DoNotOptimize(fracwalk::mixing_time(k, 0.25, true));
}
BENCHMARK(BM_MixingTimeWorstCase)->Arg(101)->Arg(211)->Unit(benchmark::kMillisecond);

}  // namespace
