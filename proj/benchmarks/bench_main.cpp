// Microbenchmarks for the hot paths: scenario simulation, moment assembly,
// cohort sampling, both equilibrium solvers and the loading sweep.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <string>
#include <vector>

#include "longswap/cohort.hpp"
#include "longswap/contract.hpp"
#include "longswap/dynamic_solver.hpp"
#include "longswap/mortality.hpp"
#include "longswap/stackelberg.hpp"
#include "longswap/static_solver.hpp"

namespace {

using namespace longswap;

std::string fixture_dir() {
#ifdef LONGSWAP_FIXTURE_DIR
  return LONGSWAP_FIXTURE_DIR;
#else
  return "data/fixtures";
#endif
}

const ApciParameters& fixture_params() {
  static const ApciParameters params =
      load_apci_parameters(fixture_dir() + "/apci_params.json");
  return params;
}

const MortalityScenarioSet& fixture_scenarios() {
  static const MortalityScenarioSet set =
      load_scenarios(fixture_dir() + "/scenarios_k2000.lswp");
  return set;
}

const SurvivalCurve& fixture_curve() {
  static const SurvivalCurve curve = estimate_curve(fixture_scenarios());
  return curve;
}

ContractSpec fixture_contract(ContractKind kind, double eta) {
  ContractSpec contract;
  contract.kind = kind;
  contract.eta = eta;
  contract.rate = 0.02;
  contract.horizon = 35;
  contract.cohort = CohortSpec{65, 10000, 35};
  return contract;
}

void BM_simulate_scenarios(benchmark::State& state) {
  const auto paths = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    const MortalityScenarioSet set =
        simulate_scenarios(fixture_params(), 65, 35, paths, 1, 0);
    benchmark::DoNotOptimize(set.survival.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          state.range(0));
}
BENCHMARK(BM_simulate_scenarios)->Arg(256)->Arg(2000)
    ->Unit(benchmark::kMillisecond);

void BM_cohort_covariance_mixture(benchmark::State& state) {
  const CohortSpec cohort{65, 10000, 35};
  for (auto _ : state) {
    const CohortMoments moments = cohort_covariance(
        cohort, fixture_scenarios(), PriorMeasure{1.05}, MomentMode::mixture);
    benchmark::DoNotOptimize(moments.mean.data());
  }
}
BENCHMARK(BM_cohort_covariance_mixture)->Unit(benchmark::kMillisecond);

void BM_cohort_covariance_point_estimate(benchmark::State& state) {
  const CohortSpec cohort{65, 10000, 35};
  for (auto _ : state) {
    const CohortMoments moments =
        cohort_covariance(cohort, fixture_scenarios(), PriorMeasure{1.05},
                          MomentMode::point_estimate);
    benchmark::DoNotOptimize(moments.mean.data());
  }
}
BENCHMARK(BM_cohort_covariance_point_estimate)->Unit(benchmark::kMillisecond);

void BM_cohort_covariance_aggregate(benchmark::State& state) {
  const CohortSpec cohort{65, 10000, 35};
  for (auto _ : state) {
    const CohortMoments moments =
        cohort_covariance(cohort, fixture_scenarios(), PriorMeasure{1.05},
                          MomentMode::aggregate);
    benchmark::DoNotOptimize(moments.mean.data());
  }
}
BENCHMARK(BM_cohort_covariance_aggregate)->Unit(benchmark::kMillisecond);

void BM_sample_cohort_paths(benchmark::State& state) {
  const CohortSpec cohort{65, 10000, 35};
  const auto chains = static_cast<std::size_t>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    const CohortPathSample sample = sample_cohort_paths(
        cohort, fixture_scenarios(), PriorMeasure{1.0}, chains, 7, threads);
    benchmark::DoNotOptimize(sample.at(0, 0));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          state.range(0));
}
BENCHMARK(BM_sample_cohort_paths)
    ->Args({100000, 1})
    ->Args({100000, 8})
    ->Unit(benchmark::kMillisecond);

void BM_static_best_response(benchmark::State& state) {
  const ContractSpec contract =
      fixture_contract(ContractKind::static_swap, 0.05);
  const CohortMoments moments =
      cohort_covariance(contract.cohort, fixture_scenarios(),
                        PriorMeasure{1.0}, MomentMode::aggregate);
  for (auto _ : state) {
    const StaticSolution solution = static_best_response(
        contract, moments, fixture_curve(), 0.3, PriorMeasure{1.0});
    benchmark::DoNotOptimize(solution.u_star);
  }
}
BENCHMARK(BM_static_best_response);

void BM_dynamic_equilibrium(benchmark::State& state) {
  const ContractSpec contract =
      fixture_contract(ContractKind::dynamic_swap, 0.05);
  for (auto _ : state) {
    const DynamicSolution solution =
        dynamic_equilibrium(contract, fixture_curve(), 0.3, PriorMeasure{1.0});
    benchmark::DoNotOptimize(solution.buyer_value);
  }
}
BENCHMARK(BM_dynamic_equilibrium);

void BM_dynamic_seller_value(benchmark::State& state) {
  const ContractSpec contract =
      fixture_contract(ContractKind::dynamic_swap, 0.05);
  const DynamicSolution solution =
      dynamic_equilibrium(contract, fixture_curve(), 0.3, PriorMeasure{1.0});
  const auto chains = static_cast<std::size_t>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    const double value =
        dynamic_seller_value(solution, contract, fixture_scenarios(),
                             PriorMeasure{1.0}, 0.1, chains, 11, threads);
    benchmark::DoNotOptimize(value);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          state.range(0));
}
BENCHMARK(BM_dynamic_seller_value)
    ->Args({20000, 1})
    ->Args({20000, 8})
    ->Unit(benchmark::kMillisecond);

void BM_lambda_interval(benchmark::State& state) {
  for (auto _ : state) {
    const AmbiguitySet interval = lambda_interval(fixture_curve(), 0.1, 101);
    benchmark::DoNotOptimize(interval.lambda_hi);
  }
}
BENCHMARK(BM_lambda_interval)->Unit(benchmark::kMicrosecond);

void BM_optimize_eta(benchmark::State& state) {
  MarketContext context;
  context.contract = fixture_contract(ContractKind::static_swap, 0.0);
  context.scenarios = &fixture_scenarios();
  context.curve = fixture_curve();
  context.gamma_b = 0.3;
  context.gamma_s = 0.1;
  context.threads = static_cast<int>(state.range(0));
  const AmbiguitySet ambiguity = lambda_interval(fixture_curve(), 0.1, 21);
  const ContractKind kind = state.range(1) == 0 ? ContractKind::static_swap
                                                : ContractKind::dynamic_swap;
  for (auto _ : state) {
    const EquilibriumSolution solution =
        optimize_eta(kind, ambiguity, context, 0.3, 0.01);
    benchmark::DoNotOptimize(solution.eta_star);
  }
}
BENCHMARK(BM_optimize_eta)
    ->Args({1, 0})
    ->Args({8, 0})
    ->Args({1, 1})
    ->Args({8, 1})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
