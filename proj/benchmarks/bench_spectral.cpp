#include <benchmark/benchmark.h>

#include "fracwalk/kernels.hpp"
#include "fracwalk/spectral.hpp"

namespace {

using fracwalk::Modulus;
using fracwalk::StepDist;

void BM_DenseEigen(benchmark::State& state) {
    const Modulus m(static_cast<std::uint64_t>(state.range(0)));
    const auto q = fracwalk::symmetrized_kernel(StepDist::uniform({0, 1}), m);
    for (auto _ : state) benchmark::DoNotOptimize(fracwalk::eigen_sym(q, fracwalk::EigenMode::Dense, 0, false));
}
BENCHMARK(BM_DenseEigen)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_IterativeEigen(benchmark::State& state) {
    const Modulus m(static_cast<std::uint64_t>(state.range(0)));
    const auto q = fracwalk::symmetrized_kernel(StepDist::uniform({0, 1}), m);
    for (auto _ : state) benchmark::DoNotOptimize(fracwalk::eigen_sym(q, fracwalk::EigenMode::Iterative, 2));
}
BENCHMARK(BM_IterativeEigen)->Arg(1009)->Arg(2003)->Unit(benchmark::kMillisecond);

}  // namespace
