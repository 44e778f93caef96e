#include <benchmark/benchmark.h>

#include <array>

#include "ising1d/random_current.hpp"

namespace {

void BM_SampleCurrent(benchmark::State& state) {
    const auto p = ising1d::ChainParams::uniform(static_cast<std::size_t>(state.range(0)), 1.0, 0.5);
    ising1d::CurrentSampler sampler(p);
    std::mt19937_64 engine(1);
    ising1d::Current c;
    for (auto _ : state) {
        sampler.sample(engine, c);
        benchmark::DoNotOptimize(c.lattice.data());
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_SwitchingCovariance(benchmark::State& state) {
    const auto p = ising1d::ChainParams::uniform(6, 1.0, 0.3);
    const auto samples = static_cast<std::uint64_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(ising1d::mc_switching_covariance(p, 0, 5, samples, ++seed));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MomentEstimate(benchmark::State& state) {
    const auto p = ising1d::ChainParams::uniform(6, 1.0, 0.3);
    const std::array<ising1d::Site, 2> sites{0, 5};
    const auto samples = static_cast<std::uint64_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(ising1d::mc_moment(p, sites, samples, ++seed));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_SampleCurrent)->Arg(6)->Arg(100)->Arg(10'000);
BENCHMARK(BM_SwitchingCovariance)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MomentEstimate)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
