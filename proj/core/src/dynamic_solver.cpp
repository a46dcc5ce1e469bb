#include "longswap/dynamic_solver.hpp"

#include <cmath>
#include <ostream>

#include "format_util.hpp"
#include "longswap/errors.hpp"
#include "longswap/parallel.hpp"

namespace longswap {

namespace {

void require_inputs(const ContractSpec& contract, const SurvivalCurve& curve) {
  contract.validate();
  if (contract.kind != ContractKind::dynamic_swap) {
    throw validation_error("dynamic solver needs a dynamic contract");
  }
  if (curve.horizon < contract.horizon ||
      curve.initial_age != contract.cohort.initial_age) {
    throw validation_error("survival curve does not match the contract");
  }
}

// Shared backward pass. When maximise is true the hedge is chosen by the
// per-period first-order condition, otherwise it is read from the solution.
void backward_pass(const ContractSpec& contract, const SurvivalCurve& curve,
                   double gamma_b, PriorMeasure prior, bool maximise,
                   DynamicSolution& solution) {
  const int T = contract.horizon;
  const double growth = 1.0 + contract.rate;
  solution.mean_leg.assign(static_cast<std::size_t>(T) + 1, 0.0);
  solution.value_leg.assign(static_cast<std::size_t>(T) + 1, 0.0);

  double accumulation = 1.0;  // (1+r)^(T-t-1) built from the last period up
  std::vector<double> acc(static_cast<std::size_t>(T), 0.0);
  for (int t = T - 1; t >= 0; --t) {
    acc[static_cast<std::size_t>(t)] = accumulation;
    accumulation *= growth;
  }

  for (int t = T - 1; t >= 0; --t) {
    const double r_t = acc[static_cast<std::size_t>(t)];
    const double p = curve.one_year[static_cast<std::size_t>(t + 1)];
    const double pt = prior.benchmark() ? p : std::pow(p, prior.lambda);
    const double variance_factor = (1.0 - pt) * pt;
    const double slope = (1.0 + contract.eta) * p - pt;
    const double f_next = solution.mean_leg[static_cast<std::size_t>(t + 1)];

    double u;
    if (maximise) {
      if (variance_factor > 0.0) {
        const double raw =
            1.0 - slope / (gamma_b * r_t * variance_factor) - f_next / r_t;
        u = raw < 0.0 ? 0.0 : (raw > 1.0 ? 1.0 : raw);
      } else {
        // No survival risk left in this period; only the mean cost matters.
        u = slope > 0.0 ? 0.0 : 1.0;
      }
      solution.hedge[static_cast<std::size_t>(t)] = u;
    } else {
      u = solution.hedge[static_cast<std::size_t>(t)];
    }

    const double mean_term = r_t * (pt + u * slope);
    solution.mean_leg[static_cast<std::size_t>(t)] = pt * f_next - mean_term;
    const double exposure = (u - 1.0) * r_t + f_next;
    solution.value_leg[static_cast<std::size_t>(t)] =
        pt * solution.value_leg[static_cast<std::size_t>(t + 1)] - mean_term -
        0.5 * gamma_b * exposure * exposure * variance_factor;
  }

  solution.buyer_value =
      contract.buyer_initial * std::pow(growth, T) +
      solution.value_leg[0] * static_cast<double>(contract.cohort.initial_count);
}

}  // namespace

DynamicSolution dynamic_equilibrium(const ContractSpec& contract,
                                    const SurvivalCurve& curve,
                                    double gamma_b, PriorMeasure prior) {
  require_inputs(contract, curve);
  prior.validate();
  if (!(gamma_b > 0.0)) {
    throw validation_error("buyer risk aversion must be positive");
  }
  DynamicSolution solution;
  solution.prior = prior;
  solution.eta = contract.eta;
  solution.hedge.assign(static_cast<std::size_t>(contract.horizon), 0.0);
  backward_pass(contract, curve, gamma_b, prior, true, solution);
  return solution;
}

DynamicSolution dynamic_fixed_policy_value(const ContractSpec& contract,
                                           const SurvivalCurve& curve,
                                           double gamma_b, PriorMeasure prior,
                                           const std::vector<double>& hedge) {
  require_inputs(contract, curve);
  prior.validate();
  if (!(gamma_b > 0.0)) {
    throw validation_error("buyer risk aversion must be positive");
  }
  if (hedge.size() != static_cast<std::size_t>(contract.horizon)) {
    throw validation_error("hedge path must have one entry per contract year");
  }
  for (double u : hedge) {
    if (!(u >= 0.0 && u <= 1.0)) {
      throw validation_error("hedge ratios must lie in [0, 1]");
    }
  }
  DynamicSolution solution;
  solution.prior = prior;
  solution.eta = contract.eta;
  solution.hedge = hedge;
  backward_pass(contract, curve, gamma_b, prior, false, solution);
  return solution;
}

double dynamic_seller_value(const DynamicSolution& solution,
                            const ContractSpec& contract,
                            const MortalityScenarioSet& scenarios,
                            PriorMeasure prior, double gamma_s,
                            std::size_t chain_count, std::uint64_t seed,
                            int threads) {
  const SurvivalCurve curve = estimate_curve(scenarios);
  require_inputs(contract, curve);
  if (chain_count < 100) {
    throw validation_error(
        "dynamic_seller_value: need at least 100 Monte Carlo chains");
  }
  if (!(gamma_s >= 0.0)) {
    throw validation_error("seller risk aversion must be non-negative");
  }
  const CohortPathSample sample = sample_cohort_paths(
      contract.cohort, scenarios, prior, chain_count, seed, threads);

  std::vector<double> terminal(chain_count);
  parallel_for(chain_count, resolve_thread_count(threads), [&](std::size_t n) {
    std::vector<std::int64_t> lives(
        static_cast<std::size_t>(contract.horizon) + 1);
    for (int t = 0; t <= contract.horizon; ++t) {
      lives[static_cast<std::size_t>(t)] = sample.at(n, t);
    }
    terminal[n] =
        terminal_surpluses(contract, solution.hedge, lives, curve)
            .seller_terminal;
  });

  // Reduce in chain order so the result does not depend on the thread count.
  double mean = 0.0;
  for (std::size_t n = 0; n < chain_count; ++n) {
    mean += (terminal[n] - mean) / static_cast<double>(n + 1);
  }
  double variance = 0.0;
  for (std::size_t n = 0; n < chain_count; ++n) {
    const double d = terminal[n] - mean;
    variance += d * d;
  }
  variance /= static_cast<double>(chain_count);
  return mean - 0.5 * gamma_s * variance;
}

double dynamic_seller_value_analytic(const DynamicSolution& solution,
                                     const ContractSpec& contract,
                                     const CohortMoments& moments,
                                     const SurvivalCurve& curve,
                                     double gamma_s) {
  require_inputs(contract, curve);
  if (!(gamma_s >= 0.0)) {
    throw validation_error("seller risk aversion must be non-negative");
  }
  const AffineTerminal terminal =
      seller_terminal_affine(contract, solution.hedge, curve);
  return mean_variance_value(terminal, moments, gamma_s);
}

std::pair<double, double> dynamic_welfare_gains(
    const ContractSpec& contract, const DynamicSolution& solution,
    const SurvivalCurve& curve, const CohortMoments& seller_moments,
    double gamma_b, double gamma_s) {
  const std::vector<double> unhedged(
      static_cast<std::size_t>(contract.horizon), 0.0);
  const DynamicSolution baseline = dynamic_fixed_policy_value(
      contract, curve, gamma_b, solution.prior, unhedged);
  const double buyer_gain = solution.buyer_value - baseline.buyer_value;
  const double seller_value = dynamic_seller_value_analytic(
      solution, contract, seller_moments, curve, gamma_s);
  const double seller_baseline =
      contract.seller_initial * std::pow(1.0 + contract.rate, contract.horizon);
  return {buyer_gain, seller_value - seller_baseline};
}

void write_hedge_path_csv(std::ostream& out, const DynamicSolution& solution) {
  out << "t,u,f,F\n";
  const auto periods = solution.hedge.size();
  for (std::size_t t = 0; t < periods; ++t) {
    out << t << ',' << detail::csv_number(solution.hedge[t]) << ','
        << detail::csv_number(solution.mean_leg[t]) << ','
        << detail::csv_number(solution.value_leg[t]) << '\n';
  }
  out << periods << ",," << detail::csv_number(solution.mean_leg[periods])
      << ',' << detail::csv_number(solution.value_leg[periods]) << '\n';
}

}  // namespace longswap
