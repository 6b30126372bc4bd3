#include <benchmark/benchmark.h>

#include <vector>

#include "tgk/krylov.hpp"
#include "tgk/problems.hpp"
#include "tgk/random.hpp"
#include "tgk/tikhonov.hpp"

namespace {

using namespace tgk;

Tensor3 random(Dims dims, std::uint64_t seed) {
  GaussianStream rng(seed);
  return random_normal(dims, rng);
}

// Dense t-product; args: size n (an n x n x n times n x p x n product), p.
void BM_Tprod(benchmark::State& state) {
  const index_t n = state.range(0);
  const index_t p = state.range(1);
  const Tensor3 a = random({n, n, n}, 1);
  const Tensor3 b = random({n, p, n}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(tprod(a, b));
}
BENCHMARK(BM_Tprod)->Args({16, 1})->Args({32, 1})->Args({32, 3})->Args({64, 1});

// Fixed operator product with precomputed faces, as inside the solvers.
void BM_OperatorApply(benchmark::State& state) {
  const index_t n = state.range(0);
  const index_t p = state.range(1);
  const TensorOperator a(build_blur({n, 3.0, 6, BlurVariant::symmetric}));
  const Tensor3 x = random({n, p, n}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(a.apply(x));
  state.SetItemsProcessed(state.iterations() * p);
}
BENCHMARK(BM_OperatorApply)->Args({64, 1})->Args({64, 3})->Args({128, 1})->Args({128, 3});

void BM_Normalize(benchmark::State& state) {
  const index_t n = state.range(0);
  const SpdOperator m = build_covariance_m(n, n, 0.2);
  const Tensor3 x = random({n, 1, n}, 4);
  GaussianStream rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(normalize(x, m, Weight::inverse, rng));
}
BENCHMARK(BM_Normalize)->Arg(32)->Arg(64);

struct Blur {
  explicit Blur(index_t n, index_t p)
      : a(build_blur({n, 3.0, 6, BlurVariant::symmetric})),
        l(build_reg_d(n, n, 1, 3.0)),
        m(build_covariance_m(n, n, 0.2)),
        b(a.apply(multi_twist(video_frames(n, static_cast<int>(p))))) {}
  Operators ops() const { return {a, l, m}; }
  TensorOperator a;
  SpdOperator l;
  SpdOperator m;
  Tensor3 b;
};

// One more bidiagonalization step on top of a 4-step run.
void BM_TubalStep(benchmark::State& state) {
  const Blur pr(state.range(0), 1);
  const TensorGkb base = wtgkb(pr.ops(), pr.b, 4);
  for (auto _ : state) benchmark::DoNotOptimize(extend(base, pr.ops(), 1));
}
BENCHMARK(BM_TubalStep)->Arg(32)->Arg(64);

void BM_GlobalStep(benchmark::State& state) {
  const Blur pr(state.range(0), state.range(1));
  const GlobalGkb base = wgg_tgkb(pr.ops(), pr.b, 4);
  for (auto _ : state) benchmark::DoNotOptimize(extend(base, pr.ops(), 1));
}
BENCHMARK(BM_GlobalStep)->Args({32, 1})->Args({64, 1})->Args({64, 3});

// Full discrepancy-principle solve on three blurred, noisy 32 x 32 frames.
void BM_Solve(benchmark::State& state) {
  const auto method = static_cast<Method>(state.range(0));
  const Blur pr(32, 3);
  const NoiseSample noise = gen_noise(pr.b, pr.m, {1e-2, 7});
  const Tensor3 b = pr.b + noise.e;
  DiscrepancyConfig cfg;
  const bool per_slice = method == Method::wtgkt_p || method == Method::wg_tgkt_p;
  cfg.delta = per_slice ? noise.slice_delta : std::vector<double>{noise.delta};
  for (auto _ : state) benchmark::DoNotOptimize(solve(method, pr.ops(), b, cfg));
  state.SetLabel(std::string(method_name(method)));
}
BENCHMARK(BM_Solve)
    ->Arg(static_cast<int>(Method::wtgkt_p))
    ->Arg(static_cast<int>(Method::wg_tgkt_p))
    ->Arg(static_cast<int>(Method::wgg_tgkt))
    ->Unit(benchmark::kMillisecond);

}  // namespace

// The packaged benchmark_main archive is built with a different LTO version.
BENCHMARK_MAIN();
