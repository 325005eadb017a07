#include <benchmark/benchmark.h>

#include "cassonlin/braid.hpp"
#include "cassonlin/catalog.hpp"
#include "cassonlin/invariant.hpp"
#include "cassonlin/labels.hpp"
#include "cassonlin/solver.hpp"
#include "cassonlin/sun.hpp"

namespace {

using namespace casson;

void BM_ActOnGenerator(benchmark::State& state) {
  BraidWord b{4, {1, 2, 3, -2, 1, 3, -1, 2, 3, 1, -3, 2}};
  for (auto _ : state) {
    for (int i = 1; i <= 4; ++i) benchmark::DoNotOptimize(act_on_generator(b, i));
  }
}
BENCHMARK(BM_ActOnGenerator);

void BM_Residual(benchmark::State& state) {
  int N = static_cast<int>(state.range(0));
  BraidAction action = make_braid_action(BraidWord{2, {1, 1}});
  EpsilonVector eps{N, {1, N - 1}};
  std::vector<Matrix> X{random_class_point(N, 1).X, random_class_point(N, 2).X};
  for (auto _ : state) benchmark::DoNotOptimize(residual(action, eps, X));
}
BENCHMARK(BM_Residual)->Arg(2)->Arg(3)->Arg(5);

void BM_ResidualGradient(benchmark::State& state) {
  int N = static_cast<int>(state.range(0));
  BraidAction action = make_braid_action(BraidWord{2, {1, 1}});
  EpsilonVector eps{N, {1, N - 1}};
  RepTuple pts{random_class_point(N, 1), random_class_point(N, 2)};
  for (auto _ : state) benchmark::DoNotOptimize(residual_gradient(action, eps, pts));
}
BENCHMARK(BM_ResidualGradient)->Arg(2)->Arg(3)->Arg(5);

void BM_SolveHopf(benchmark::State& state) {
  int N = static_cast<int>(state.range(0));
  BraidWord hopf{2, {1, 1}};
  EpsilonVector eps{N, {1, N - 1}};
  SolverConfig cfg;
  cfg.restarts = 20;
  cfg.seed = 11;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(solve_fixed_points(hopf, eps, cfg));
}
BENCHMARK(BM_SolveHopf)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Linearize(benchmark::State& state) {
  int N = 3;
  BraidAction action = make_braid_action(chain_braid(3));
  LabelSpec spec{N, {1, 1, 1}};
  EpsilonVector eps = compatible_epsilon(action.cycles, spec);
  RepTuple pts{random_class_point(N, 1), random_class_point(N, 2), random_class_point(N, 3)};
  TangentFrame frame = build_tangent_frame(pts);
  for (auto _ : state) benchmark::DoNotOptimize(linearize(action, eps, pts, frame));
}
BENCHMARK(BM_Linearize);

void BM_Fingerprint(benchmark::State& state) {
  int N = 4;
  std::vector<Matrix> X{random_class_point(N, 1).X, random_class_point(N, 2).X,
                        random_class_point(N, 3).X, random_class_point(N, 4).X};
  std::vector<FreeWord> words = canonical_words(4);
  for (auto _ : state) benchmark::DoNotOptimize(fingerprint(X, words));
}
BENCHMARK(BM_Fingerprint);

}  // namespace

BENCHMARK_MAIN();
