#include "specmeter/approx.hpp"
#include "specmeter/conditions.hpp"
#include "specmeter/ensembles.hpp"
#include "specmeter/harness.hpp"
#include "specmeter/measures.hpp"
#include "specmeter/spectra.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace specmeter;

namespace {

EmpiricalMeasure wigner_esd(int n, std::uint64_t seed) {
    const auto h = sample_matrix(EnsembleSpec::wigner(EntryLaw::gaussian()), n, RngStream(seed, {static_cast<std::uint64_t>(n)}));
    return esd(h, std::sqrt(static_cast<double>(n)));
}

void BM_Eigenvalues(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto h = sample_matrix(EnsembleSpec::wigner(EntryLaw::complex_gaussian()), n, RngStream(1, {static_cast<std::uint64_t>(n)}));
    for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(h));
    state.SetComplexityN(n);
}
BENCHMARK(BM_Eigenvalues)->RangeMultiplier(2)->Range(32, 512)->Complexity(benchmark::oNCubed);

void BM_SampleWigner(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto spec = EnsembleSpec::wigner(EntryLaw::rademacher());
    std::uint64_t k = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_matrix(spec, n, RngStream(2, {k++})));
}
BENCHMARK(BM_SampleWigner)->RangeMultiplier(4)->Range(64, 1024);

void BM_SampleToeplitz(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto spec = EnsembleSpec::patterned(EnsembleKind::Toeplitz, EntryLaw::gaussian());
    std::uint64_t k = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_matrix(spec, n, RngStream(3, {k++})));
}
BENCHMARK(BM_SampleToeplitz)->RangeMultiplier(4)->Range(64, 1024);

void BM_Kolmogorov(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto a = wigner_esd(n, 4), b = wigner_esd(n, 5);
    for (auto _ : state) benchmark::DoNotOptimize(kolmogorov(a, b));
}
BENCHMARK(BM_Kolmogorov)->RangeMultiplier(4)->Range(64, 1024);

void BM_LevyProkhorov(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto a = wigner_esd(n, 6), b = wigner_esd(n, 7);
    for (auto _ : state) benchmark::DoNotOptimize(levy_prokhorov(a, b));
}
BENCHMARK(BM_LevyProkhorov)->RangeMultiplier(4)->Range(64, 1024);

void BM_BlSeries(benchmark::State& state) {
    const int n = 256;
    const int terms = static_cast<int>(state.range(0));
    const auto a = wigner_esd(n, 8), b = wigner_esd(n, 9);
    for (auto _ : state) benchmark::DoNotOptimize(bl_series_metric(a, b, terms));
}
BENCHMARK(BM_BlSeries)->Arg(16)->Arg(64)->Arg(256);

void BM_SolveBn(benchmark::State& state) {
    const auto law = EntryLaw::heavy_cubic(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_bn(law, state.range(0)));
}
BENCHMARK(BM_SolveBn)->Arg(100)->Arg(1000000);

void BM_FDelta(benchmark::State& state) {
    const double delta = 1.0 / static_cast<double>(state.range(0));
    RngStream s(10, {});
    const auto f = random_lipschitz_function(2.0, s);
    for (auto _ : state) benchmark::DoNotOptimize(build_f_delta(f, 2.0, delta));
}
BENCHMARK(BM_FDelta)->Arg(2)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
