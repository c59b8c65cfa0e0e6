#include <benchmark/benchmark.h>

#include "dhc/bloch.hpp"
#include "dhc/oracle.hpp"
#include "dhc/quadratic.hpp"

using namespace dhc;

static void BM_BuildMatrix(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const Lattice lat({L, L, Boundary::periodic});
    const GaugeConfig g = GaugeConfig::uniform(lat);
    for (auto _ : state) benchmark::DoNotOptimize(build_matrix(lat, g, 1.0, 0.4));
}
BENCHMARK(BM_BuildMatrix)->Arg(8)->Arg(16)->Arg(32);

static void BM_Eigendecompose(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const Lattice lat({L, L, Boundary::periodic});
    const auto m = build_matrix(lat, GaugeConfig::uniform(lat), 1.0, 0.4);
    for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(m));
    state.SetLabel("dim " + std::to_string(m.dim));
}
BENCHMARK(BM_Eigendecompose)->Arg(4)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_EigendecomposeComplexPath(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const Lattice lat({L, L, Boundary::periodic});
    const auto m = build_matrix(lat, GaugeConfig::uniform(lat), 1.0, 0.4);
    for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(m.entries));
}
BENCHMARK(BM_EigendecomposeComplexPath)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_BrokenCount(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bloch::broken_count({L, L, Boundary::periodic}, 1.0, 0.3));
}
BENCHMARK(BM_BrokenCount)->Arg(20)->Arg(64)->Arg(256);

static void BM_EpLocus(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(bloch::ep_locus(1.0, 0.4, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_EpLocus)->Arg(90)->Arg(720)->Unit(benchmark::kMillisecond);

static void BM_Superoperator(benchmark::State& state) {
    const auto sys = state.range(0) == 1 ? oracle::OracleSystem::single_site() : oracle::OracleSystem::single_bond();
    for (auto _ : state) {
        const auto H = oracle::build_hamiltonian(sys, 1.0);
        benchmark::DoNotOptimize(oracle::vectorize(H, oracle::jump_operators(sys, 0.4)));
    }
}
BENCHMARK(BM_Superoperator)->Arg(1)->Arg(2);

static void BM_SteadyStatesTwoSites(benchmark::State& state) {
    const auto sys = oracle::OracleSystem::single_bond();
    const auto L = oracle::vectorize(oracle::build_hamiltonian(sys, 1.0), oracle::jump_operators(sys, 0.4));
    for (auto _ : state) benchmark::DoNotOptimize(oracle::steady_states(L));
}
BENCHMARK(BM_SteadyStatesTwoSites)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
