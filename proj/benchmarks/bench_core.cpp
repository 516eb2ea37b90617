#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "toposeg/grid_topology.hpp"
#include "toposeg/persistence.hpp"
#include "toposeg/soft_euler.hpp"

namespace {

toposeg::ProbMap random_probmap(int side, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> values(static_cast<std::size_t>(side) * side);
    for (double& v : values) {
        v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }
    return toposeg::ProbMap(side, side, std::move(values));
}

toposeg::BinaryMask random_mask(int side, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> px(static_cast<std::size_t>(side) * side);
    for (auto& v : px) {
        v = (rng() & 1u) ? 1 : 0;
    }
    return toposeg::BinaryMask(side, side, std::move(px));
}

void BM_SoftEulerChar(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const toposeg::ProbMap p = random_probmap(side, 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(toposeg::soft_euler_char(p));
    }
    state.SetComplexityN(static_cast<std::int64_t>(side) * side);
}
BENCHMARK(BM_SoftEulerChar)->RangeMultiplier(2)->Range(128, 1024)->Complexity(benchmark::oN);

void BM_SoftEulerGrad(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const toposeg::ProbMap p = random_probmap(side, 43);
    for (auto _ : state) {
        benchmark::DoNotOptimize(toposeg::soft_euler_grad(p));
    }
    state.SetComplexityN(static_cast<std::int64_t>(side) * side);
}
BENCHMARK(BM_SoftEulerGrad)->RangeMultiplier(2)->Range(128, 1024)->Complexity(benchmark::oN);

void BM_BettiNumbers(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const toposeg::BinaryMask m = random_mask(side, 44);
    for (auto _ : state) {
        benchmark::DoNotOptimize(toposeg::betti_numbers(m));
    }
    state.SetComplexityN(static_cast<std::int64_t>(side) * side);
}
BENCHMARK(BM_BettiNumbers)->RangeMultiplier(2)->Range(128, 1024)->Complexity();

void BM_H0Diagram(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const toposeg::ProbMap p = random_probmap(side, 45);
    for (auto _ : state) {
        benchmark::DoNotOptimize(toposeg::h0_superlevel_diagram(p));
    }
    state.SetComplexityN(static_cast<std::int64_t>(side) * side);
}
BENCHMARK(BM_H0Diagram)->RangeMultiplier(2)->Range(64, 256)->Complexity();

}  // namespace

BENCHMARK_MAIN();
