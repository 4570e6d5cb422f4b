// Serial reference vs OpenMP kernels. Arg 0 runs serial, 1 parallel.

#include <benchmark/benchmark.h>

#include "gibbs/discrete.hpp"
#include "gibbs/estimators.hpp"
#include "gibbs/gaussian_mean.hpp"
#include "gibbs/samplers.hpp"

using namespace gibbs;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) == 0 ? Execution::serial : Execution::parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_mc_gen_error(benchmark::State& state) {
  const auto p = gaussian::GaussianMeanProblem::unit(2, 10);
  const Learner learner = exact_posterior_learner(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mc_gen_error(p.data_model(), learner, LossFunction::squared_error(), 50000, 0, 1, mode(state)));
  }
  label(state);
}
BENCHMARK(BM_mc_gen_error)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_iskl_energy_gap(benchmark::State& state) {
  const auto p = discrete::DiscreteProblem::iid({0.2, 0.3, 0.5}, {0.25, 0.25, 0.25, 0.25},
                                                {{0.1, 0.9, 0.4}, {0.7, 0.2, 0.5}, {0.3, 0.3, 0.8}, {0.6, 0.1, 0.2}}, 3,
                                                1.5);
  const GibbsSpec spec = p.gibbs_spec();
  for (auto _ : state) {
    benchmark::DoNotOptimize(iskl_energy_gap(spec, p.data, 50000, 2, mode(state)));
  }
  label(state);
}
BENCHMARK(BM_iskl_energy_gap)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_enumerate_joint(benchmark::State& state) {
  RandomStream stream(3);
  const std::vector<double> pz = discrete::random_pmf(stream, 12);
  const std::vector<double> prior = discrete::random_pmf(stream, 16);
  std::vector<std::vector<double>> loss(16, std::vector<double>(12));
  for (auto& row : loss) {
    for (double& v : row) v = stream.uniform();
  }
  const auto p = discrete::DiscreteProblem::iid(pz, prior, loss, 4, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(discrete::enumerate_joint(p, mode(state)));
  }
  label(state);
}
BENCHMARK(BM_enumerate_joint)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_run_chains(benchmark::State& state) {
  const auto p = gaussian::GaussianMeanProblem::unit(1, 10);
  const GibbsSpec spec = p.gibbs_spec();
  const Dataset s = Dataset::scalars({0.3, -1.2, 0.8, 1.9, -0.4, 0.1, 0.7, -0.9, 1.4, 0.5});
  const EnergyGradient grad = squared_error_energy_gradient();
  ChainConfig cfg;
  cfg.steps = 20000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_chains([&](RandomStream& st) { return langevin_chain(spec, s, grad, cfg, st); }, 8, 4, mode(state)));
  }
  label(state);
}
BENCHMARK(BM_run_chains)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
