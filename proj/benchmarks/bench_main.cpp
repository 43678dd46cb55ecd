#include <benchmark/benchmark.h>

#include "gapforge/covering.hpp"
#include "gapforge/jacobsthal.hpp"

using namespace gapforge;

static void BM_PrimesUpTo(benchmark::State& state) {
    const u64 n = static_cast<u64>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(primes_up_to(n));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * n));
}
BENCHMARK(BM_PrimesUpTo)->RangeMultiplier(10)->Range(10'000, 10'000'000)->Unit(benchmark::kMillisecond);

static void BM_MaxPrimeGap(benchmark::State& state) {
    SieveConfig config;
    config.threads = static_cast<unsigned>(state.range(1));
    const u64 n = static_cast<u64>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(max_prime_gap(n, config));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * n));
}
BENCHMARK(BM_MaxPrimeGap)->Args({100'000'000, 1})->Args({100'000'000, 4})->Unit(benchmark::kMillisecond);

static void BM_IsPrime(benchmark::State& state) {
    u64 n = (u64{1} << 62) + 1;
    for (auto _ : state) benchmark::DoNotOptimize(is_prime(n += 2));
}
BENCHMARK(BM_IsPrime);

static void BM_JacobsthalExact(benchmark::State& state) {
    const u64 u = static_cast<u64>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(jacobsthal_exact(u));
}
BENCHMARK(BM_JacobsthalExact)->Arg(13)->Arg(19)->Arg(23)->Unit(benchmark::kMillisecond);

static void BM_BuildCertificate(benchmark::State& state) {
    const u64 x = static_cast<u64>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_certificate(x, 101, 100));
}
BENCHMARK(BM_BuildCertificate)->Arg(10'000)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

static void BM_CrtWitness(benchmark::State& state) {
    const CoveringCertificate c = build_certificate(static_cast<u64>(state.range(0)), 101, 100);
    for (auto _ : state) benchmark::DoNotOptimize(crt_witness(c));
}
BENCHMARK(BM_CrtWitness)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
