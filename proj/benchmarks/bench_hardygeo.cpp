#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <vector>

#include "hardygeo/deltacalc.hpp"
#include "hardygeo/distfield.hpp"
#include "hardygeo/domains.hpp"
#include "hardygeo/hardyopt.hpp"
#include "hardygeo/symfun.hpp"

namespace hg = hardygeo;

namespace {

std::unique_ptr<hg::Domain> make_dom(
    const std::string& kind,
    const std::vector<std::pair<std::string, double>>& num, int dim = 0) {
  hg::DomainSpec spec;
  spec.kind = kind;
  spec.num = num;
  spec.dim = dim;
  return hg::make_domain(spec);
}

std::vector<double> random_vector(int n) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = std::exp(u(rng));
  return v;
}

}  // namespace

static void BM_SigmaAll(benchmark::State& state) {
  const std::vector<double> v = random_vector((int)state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hg::sigma_all(v));
}
BENCHMARK(BM_SigmaAll)->Arg(8)->Arg(32);

static void BM_NewtonChain(benchmark::State& state) {
  const std::vector<double> v = random_vector((int)state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hg::newton_chain(v));
}
BENCHMARK(BM_NewtonChain)->Arg(8)->Arg(32);

static void BM_BuildDistanceField(benchmark::State& state) {
  std::unique_ptr<hg::Domain> sq = make_dom("box", {{"a", 1.0}, {"b", 1.0}});
  const hg::Grid grid = hg::make_grid(*sq, (int)state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(hg::build_distance_field(*sq, grid));
}
BENCHMARK(BM_BuildDistanceField)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_NegLaplacian(benchmark::State& state) {
  std::unique_ptr<hg::Domain> disk = make_dom("ball", {{"R", 1.0}}, 2);
  const hg::Grid grid = hg::make_grid(*disk, (int)state.range(0));
  const hg::DistanceField field = hg::build_distance_field(*disk, grid);
  for (auto _ : state)
    benchmark::DoNotOptimize(hg::neg_laplacian_formula(*disk, field));
}
BENCHMARK(BM_NegLaplacian)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_RayleighQuotient(benchmark::State& state) {
  std::unique_ptr<hg::Domain> sq = make_dom("box", {{"a", 1.0}, {"b", 1.0}});
  const hg::Grid grid = hg::make_grid(*sq, 128);
  const hg::DistanceField field = hg::build_distance_field(*sq, grid);
  const hg::TrialFunction t = hg::boundary_layer_trial(*sq, field, 0.05, 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(hg::rayleigh_quotient(t, field, 2.0));
}
BENCHMARK(BM_RayleighQuotient)->Unit(benchmark::kMillisecond);

static void BM_AnalyticLambda(benchmark::State& state) {
  std::unique_ptr<hg::Domain> torus =
      make_dom("torus", {{"r", 1.0}, {"R", 2.0}});
  for (auto _ : state)
    benchmark::DoNotOptimize(hg::analytic_lambda(*torus, 1024, 1024));
}
BENCHMARK(BM_AnalyticLambda)->Unit(benchmark::kMillisecond);

static void BM_EstimateMu(benchmark::State& state) {
  std::unique_ptr<hg::Domain> sq = make_dom("box", {{"a", 1.0}, {"b", 1.0}});
  const hg::Grid grid = hg::make_grid(*sq, (int)state.range(0));
  const hg::DistanceField field = hg::build_distance_field(*sq, grid);
  for (auto _ : state)
    benchmark::DoNotOptimize(hg::estimate_mu(*sq, field, 2.0, {}));
}
BENCHMARK(BM_EstimateMu)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
