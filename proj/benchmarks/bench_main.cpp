#include <benchmark/benchmark.h>

#include "qsteer/assemblage.hpp"
#include "qsteer/gaussian.hpp"
#include "qsteer/ghz.hpp"
#include "qsteer/oracle.hpp"

namespace {

const qsteer::Constants kNatural{};

qsteer::gaussian::TmssParams bench_params() {
  return qsteer::gaussian::TmssParams::standard(0.37, 0.6, 0.5, 1.3, kNatural);
}

Eigen::MatrixXcd bench_state(int dim, std::uint64_t stream) {
  auto rng = qsteer::oracle::CounterRng::from_seed(2024, stream);
  Eigen::MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = {rng.next_normal(), rng.next_normal()};
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

Eigen::MatrixXcd bench_observable(int dim, std::uint64_t stream) {
  auto rng = qsteer::oracle::CounterRng::from_seed(4048, stream);
  Eigen::MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = {rng.next_normal(), rng.next_normal()};
  return 0.5 * (g + g.adjoint()).eval();
}

void BM_gamma_closed(benchmark::State& state) {
  double z = 0.37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qsteer::gaussian::gamma_free_particle(z, 0.6, 0.5, 1.3));
  }
}
BENCHMARK(BM_gamma_closed);

void BM_gamma_pipeline(benchmark::State& state) {
  const auto params = bench_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(qsteer::gaussian::gamma_free_particle_pipeline(params, kNatural));
  }
}
BENCHMARK(BM_gamma_pipeline);

void BM_condition_homodyne(benchmark::State& state) {
  const auto tmss = qsteer::gaussian::tmss_covariance(bench_params(), kNatural);
  const qsteer::gaussian::HomodyneSetting setting{qsteer::gaussian::Quadrature::position, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(qsteer::gaussian::condition_on_homodyne(tmss, setting, 0.2, kNatural));
  }
}
BENCHMARK(BM_condition_homodyne);

void BM_spectral_qfi(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto rho = bench_state(dim, 11);
  const auto obs = bench_observable(dim, 12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qsteer::ghz::spectral_qfi(rho, obs, kNatural));
  }
}
BENCHMARK(BM_spectral_qfi)->Arg(4)->Arg(8)->Arg(16);

void BM_bures_distance(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto rho = bench_state(dim, 21);
  const auto sigma = bench_state(dim, 22);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qsteer::ghz::bures_distance(rho, sigma));
  }
}
BENCHMARK(BM_bures_distance)->Arg(4)->Arg(8)->Arg(16);

void BM_ghz_witness(benchmark::State& state) {
  const qsteer::ghz::GhzScenario scenario{static_cast<int>(state.range(0)), 0.8, 1.0, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(qsteer::ghz::ghz_geometric_witness(scenario, 0.01));
  }
}
BENCHMARK(BM_ghz_witness)->Arg(2)->Arg(4)->Arg(6)->Arg(8);

void BM_quad_fourth_moment(benchmark::State& state) {
  const auto bipartite = qsteer::gaussian::tmss_covariance(bench_params(), kNatural);
  const qsteer::gaussian::HomodyneSetting setting{qsteer::gaussian::Quadrature::momentum, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(qsteer::oracle::quad_conditional_moment(
        bipartite, setting, qsteer::oracle::MomentFunctional::fourth_p, kNatural));
  }
}
BENCHMARK(BM_quad_fourth_moment);

void BM_mc_fourth_moment(benchmark::State& state) {
  const auto bipartite = qsteer::gaussian::tmss_covariance(bench_params(), kNatural);
  const qsteer::gaussian::HomodyneSetting setting{qsteer::gaussian::Quadrature::momentum, 0.0};
  qsteer::oracle::McConfig cfg;
  cfg.seed = 99;
  cfg.stream = 1;
  cfg.samples = 100000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qsteer::oracle::mc_conditional_moment(
        bipartite, setting, qsteer::oracle::MomentFunctional::fourth_p, kNatural, cfg));
  }
}
BENCHMARK(BM_mc_fourth_moment);

}  // namespace

BENCHMARK_MAIN();
