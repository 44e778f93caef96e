#include <benchmark/benchmark.h>

#include "ising1d/chain_model.hpp"
#include "ising1d/random_current.hpp"

namespace {

void BM_PartitionFunctionEnum(benchmark::State& state) {
    const auto p = ising1d::ChainParams::uniform(static_cast<std::size_t>(state.range(0)), 0.7, 0.3);
    for (auto _ : state) benchmark::DoNotOptimize(ising1d::partition_function_enum(p));
}

void BM_CovarianceEnum(benchmark::State& state) {
    const auto p = ising1d::ChainParams::uniform(static_cast<std::size_t>(state.range(0)), 0.7, 0.3);
    for (auto _ : state) benchmark::DoNotOptimize(ising1d::covariance_enum(p, 0, p.last_site()));
}

void BM_BoundaryMatchProbability(benchmark::State& state) {
    const auto p = ising1d::ChainParams::uniform(static_cast<std::size_t>(state.range(0)), 0.7, 0.3);
    for (auto _ : state) benchmark::DoNotOptimize(ising1d::boundary_match_probability(p));
}

}  // namespace

BENCHMARK(BM_PartitionFunctionEnum)->DenseRange(4, 20, 4);
BENCHMARK(BM_CovarianceEnum)->DenseRange(4, 16, 4);
BENCHMARK(BM_BoundaryMatchProbability)->DenseRange(4, 16, 4);
