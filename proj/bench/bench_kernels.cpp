// Serial reference kernels against their OpenMP versions. The thread count
// follows DAA_NUM_THREADS (or OMP_NUM_THREADS when that is unset).
#include <benchmark/benchmark.h>

#include <cstdlib>

#include "daa/kernels.hpp"
#include "daa/numerics.hpp"
#include "daa/random.hpp"

using namespace daa;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, RandomSource& rng) {
  Matrix m(r, c);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

Matrix random_stochastic(std::size_t r, std::size_t c, RandomSource& rng) {
  Matrix m(r, c);
  const std::vector<double> ones(c, 1.0);
  for (std::size_t i = 0; i < r; ++i) {
    const auto w = dirichlet_sample(ones, rng);
    std::copy(w.begin(), w.end(), m.row(i).begin());
  }
  return m;
}

template <bool Parallel>
void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomSource rng(1);
  const Matrix a = random_matrix(n, 64, rng), b = random_matrix(64, 64, rng);
  Matrix c(n, 64);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::matmul_omp(a, b, c);
    else kernels::matmul_serial(a, b, c);
    benchmark::DoNotOptimize(c.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <bool Parallel>
void BM_RowResiduals(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomSource rng(2);
  const Matrix x = random_matrix(n, 8, rng), a = random_stochastic(n, 3, rng), z = random_matrix(3, 8, rng);
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::row_residuals_omp(x, a, z, out);
    else kernels::row_residuals_serial(x, a, z, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <bool Parallel>
void BM_SimplexLsq(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomSource rng(3);
  const Matrix x = random_matrix(n, 8, rng), z = random_matrix(5, 8, rng), w0 = random_stochastic(n, 5, rng);
  for (auto _ : state) {
    state.PauseTiming();
    Matrix w = w0;
    state.ResumeTiming();
    if constexpr (Parallel) kernels::simplex_lsq_rows_omp(x, z, w, {});
    else kernels::simplex_lsq_rows_serial(x, z, w, {});
    benchmark::DoNotOptimize(w.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

}  // namespace

BENCHMARK(BM_Matmul<false>)->Name("matmul/serial")->Arg(1000)->Arg(10000)->UseRealTime();
BENCHMARK(BM_Matmul<true>)->Name("matmul/omp")->Arg(1000)->Arg(10000)->UseRealTime();
BENCHMARK(BM_RowResiduals<false>)->Name("row_residuals/serial")->Arg(10000)->Arg(100000)->UseRealTime();
BENCHMARK(BM_RowResiduals<true>)->Name("row_residuals/omp")->Arg(10000)->Arg(100000)->UseRealTime();
BENCHMARK(BM_SimplexLsq<false>)->Name("simplex_lsq/serial")->Arg(1000)->Arg(10000)->UseRealTime();
BENCHMARK(BM_SimplexLsq<true>)->Name("simplex_lsq/omp")->Arg(1000)->Arg(10000)->UseRealTime();

int main(int argc, char** argv) {
  if (std::getenv(kernels::kThreadsEnvVar)) kernels::set_threads_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
