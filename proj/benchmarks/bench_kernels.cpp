#include <benchmark/benchmark.h>

#include "fracwalk/kernels.hpp"

namespace {

using fracwalk::Modulus;
using fracwalk::StepDist;

void BM_WalkKernel(benchmark::State& state) {
    const Modulus m(static_cast<std::uint64_t>(state.range(0)));
    const auto mu = StepDist::uniform({0, 1});
    for (auto _ : state) benchmark::DoNotOptimize(fracwalk::walk_kernel(mu, m));
}
BENCHMARK(BM_WalkKernel)->Arg(101)->Arg(1009)->Arg(10007);

void BM_SymmetrizedKernel(benchmark::State& state) {
    const Modulus m(static_cast<std::uint64_t>(state.range(0)));
    const auto mu = StepDist::uniform({0, 1});
    for (auto _ : state) benchmark::DoNotOptimize(fracwalk::symmetrized_kernel(mu, m));
}
BENCHMARK(BM_SymmetrizedKernel)->Arg(101)->Arg(1009)->Arg(10007);

}  // namespace
