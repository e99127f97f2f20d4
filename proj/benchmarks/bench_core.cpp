#include <benchmark/benchmark.h>

#include <vector>

#include "dck/estimator.hpp"
#include "dck/kernelmat.hpp"
#include "dck/maxent.hpp"
#include "dck/rkhs.hpp"

namespace {

using namespace dck;

TimeGrid uniform_grid(std::size_t n) { return TimeGrid::uniform(TimeGrid::Domain::HalfLine, 0.0, 10.0, n); }

void BM_Assemble(benchmark::State& state) {
    const auto grid = uniform_grid(static_cast<std::size_t>(state.range(0)));
    const auto spec = KernelSpec::dc(0.8, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(assemble(spec, grid));
}
BENCHMARK(BM_Assemble)->RangeMultiplier(4)->Range(16, 1024);

void BM_TridiagonalInverse(benchmark::State& state) {
    const auto km = assemble(KernelSpec::dc(0.8, 0.5), uniform_grid(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(tridiagonal_inverse(km));
}
BENCHMARK(BM_TridiagonalInverse)->RangeMultiplier(4)->Range(16, 1024);

// The general-purpose inverse the constructive one replaces.
void BM_DenseInverse(benchmark::State& state) {
    const auto km = assemble(KernelSpec::dc(0.8, 0.5), uniform_grid(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(dense_inverse(km.entries));
}
BENCHMARK(BM_DenseInverse)->RangeMultiplier(4)->Range(16, 256);

void BM_OutputGramStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Dataset data;
    data.input = StepInput{};
    data.outputs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) data.output_times.push_back(0.1 * static_cast<double>(i + 1));
    for (auto _ : state) benchmark::DoNotOptimize(output_kernel(KernelSpec::dc(0.8, 0.5), data).gram);
}
BENCHMARK(BM_OutputGramStep)->Arg(10)->Arg(40);

void BM_NormIntegral(benchmark::State& state) {
    const auto g = FunctionHandle::exp_sum({{1.0, 2.0}});
    const auto spec = KernelSpec::dc(1.0, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(dc_norm_integral(g, spec).value);
}
BENCHMARK(BM_NormIntegral);

void BM_SampleDcProcess(benchmark::State& state) {
    const auto grid = uniform_grid(20);
    const auto spec = KernelSpec::dc(0.8, 0.5);
    const auto count = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sample_dc_process(grid, spec, 1, count));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_SampleDcProcess)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
