#include <benchmark/benchmark.h>

#include <random>

#include "qtomo/analytic.hpp"
#include "qtomo/estimators.hpp"
#include "qtomo/metrics.hpp"
#include "qtomo/povm.hpp"
#include "qtomo/simulate.hpp"

using namespace qtomo;

namespace {

const CMatrix& fig1_state() {
  static const CMatrix rho = bloch_state({0.6886, 0.1137, -0.5025});
  return rho;
}

void BM_FrameAt(benchmark::State& state) {
  const Povm p = builtin_povm(state.range(0) == 2 ? "cube" : "mub5");
  const CMatrix rho = state.range(0) == 2 ? fig1_state() : maximally_mixed(5);
  for (auto _ : state) benchmark::DoNotOptimize(frame_superop_at(p, rho));
}
BENCHMARK(BM_FrameAt)->Arg(2)->Arg(5);

void BM_BluePlugin(benchmark::State& state) {
  const Povm cube = platonic_povm("cube");
  const auto counts = sample_counts(cube.probabilities(fig1_state()), 10000, 1);
  const Frequencies f(counts);
  BlueOptions o;
  for (auto _ : state) benchmark::DoNotOptimize(blue(cube, f, o));
}
BENCHMARK(BM_BluePlugin);

void BM_Mle(benchmark::State& state) {
  const Povm cube = platonic_povm("cube");
  const auto counts = sample_counts(cube.probabilities(fig1_state()), static_cast<std::uint64_t>(state.range(0)), 1);
  const Frequencies f(counts);
  for (auto _ : state) benchmark::DoNotOptimize(mle(cube, f));
}
BENCHMARK(BM_Mle)->Arg(1000)->Arg(100000);

void BM_BlueMseMatrix(benchmark::State& state) {
  const Povm cube = platonic_povm("cube");
  for (auto _ : state) benchmark::DoNotOptimize(blue_mse_matrix(cube, fig1_state()));
}
BENCHMARK(BM_BlueMseMatrix);

void BM_HaarAverage(benchmark::State& state) {
  const Povm cube = platonic_povm("cube");
  const auto f = [&](const CMatrix& r) { return wmse(blue_mse_matrix(cube, r), identity_superop(2)); };
  for (auto _ : state) benchmark::DoNotOptimize(haar_average(f, qubit_spectrum(0.6), 1000, 3, 1));
}
BENCHMARK(BM_HaarAverage)->Unit(benchmark::kMillisecond);

void BM_CovariantParams(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(covariant_params(6, 2, 0.7));
}
BENCHMARK(BM_CovariantParams);

}  // namespace

BENCHMARK_MAIN();
