#include <benchmark/benchmark.h>

#include <random>

#include "ising1d/bounds.hpp"
#include "ising1d/transfer_solver.hpp"

namespace {

ising1d::ChainParams random_chain(std::size_t n_sites, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> J(0.0, 3.0), h(-2.0, 2.0);
    std::vector<double> couplings(n_sites - 1), fields(n_sites);
    for (auto& v : couplings) v = J(rng);
    for (auto& v : fields) v = h(rng);
    return {couplings, fields};
}

void BM_LogPartition(benchmark::State& state) {
    const auto p = random_chain(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(ising1d::log_partition(p));
    state.SetComplexityN(state.range(0));
}

void BM_SolverConstruction(benchmark::State& state) {
    const auto p = random_chain(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) {
        ising1d::TransferSolver s(p);
        benchmark::DoNotOptimize(s.log_partition());
    }
    state.SetComplexityN(state.range(0));
}

void BM_EndpointCovariance(benchmark::State& state) {
    const auto p = random_chain(static_cast<std::size_t>(state.range(0)), 3);
    const ising1d::TransferSolver s(p);
    for (auto _ : state) benchmark::DoNotOptimize(s.covariance(0, p.last_site()));
    state.SetComplexityN(state.range(0));
}

void BM_CompareEndpoints(benchmark::State& state) {
    const auto p = random_chain(static_cast<std::size_t>(state.range(0)), 4);
    const ising1d::CompareOptions no_enum{ising1d::EffectiveFieldRoute::signed_model, 0};
    for (auto _ : state) benchmark::DoNotOptimize(ising1d::compare(p, 0, p.last_site(), no_enum));
}

}  // namespace

BENCHMARK(BM_LogPartition)->RangeMultiplier(10)->Range(10, 1'000'000)->Complexity(benchmark::oN);
BENCHMARK(BM_SolverConstruction)->RangeMultiplier(10)->Range(10, 100'000)->Complexity(benchmark::oN);
BENCHMARK(BM_EndpointCovariance)->RangeMultiplier(10)->Range(10, 100'000)->Complexity(benchmark::oN);
BENCHMARK(BM_CompareEndpoints)->Arg(13)->Arg(200)->Arg(10'000);
