#include "longswap/static_solver.hpp"

#include <algorithm>
#include <cmath>

#include "longswap/errors.hpp"

namespace longswap {

namespace {

void require_inputs(const ContractSpec& contract, const CohortMoments& moments,
                    const SurvivalCurve& curve) {
  contract.validate();
  if (contract.kind != ContractKind::static_swap) {
    throw validation_error("static solver needs a static contract");
  }
  if (moments.horizon != contract.horizon) {
    throw validation_error("moments horizon does not match the contract");
  }
  if (curve.horizon < contract.horizon ||
      curve.initial_age != contract.cohort.initial_age) {
    throw validation_error("survival curve does not match the contract");
  }
}

// Discounted hedge cost c1 and exposure variance d1 for the given moments.
void cost_and_variance(const ContractSpec& contract,
                       const CohortMoments& moments,
                       const SurvivalCurve& curve, double& c1, double& d1) {
  const int T = contract.horizon;
  const double growth = 1.0 + contract.rate;
  std::vector<double> acc(static_cast<std::size_t>(T) + 1);
  acc[static_cast<std::size_t>(T)] = 1.0;
  for (int t = T - 1; t >= 1; --t) {
    acc[static_cast<std::size_t>(t)] =
        acc[static_cast<std::size_t>(t + 1)] * growth;
  }
  c1 = 0.0;
  for (int i = 1; i <= T; ++i) {
    const double fixed_leg = (1.0 + contract.eta) *
                             static_cast<double>(contract.cohort.initial_count) *
                             curve.multi_year[static_cast<std::size_t>(i)];
    c1 += acc[static_cast<std::size_t>(i)] *
          (fixed_leg - moments.mean[static_cast<std::size_t>(i)]);
  }
  d1 = 0.0;
  for (int i = 1; i <= T; ++i) {
    for (int j = 1; j <= T; ++j) {
      d1 += acc[static_cast<std::size_t>(i)] * acc[static_cast<std::size_t>(j)] *
            moments.cov_at(i, j);
    }
  }
}

}  // namespace

StaticSolution static_best_response(const ContractSpec& contract,
                                    const CohortMoments& moments,
                                    const SurvivalCurve& curve,
                                    double gamma_b, PriorMeasure prior) {
  require_inputs(contract, moments, curve);
  prior.validate();
  if (moments.measure.lambda != prior.lambda) {
    throw validation_error("moments were built under a different prior");
  }
  if (!(gamma_b > 0.0)) {
    throw validation_error("buyer risk aversion must be positive");
  }

  StaticSolution solution;
  solution.prior = prior;
  solution.eta = contract.eta;
  cost_and_variance(contract, moments, curve, solution.c1, solution.d1);

  if (solution.d1 > 0.0) {
    solution.u_star =
        std::clamp(1.0 - solution.c1 / (gamma_b * solution.d1), 0.0, 1.0);
  } else {
    solution.u_star = solution.c1 < 0.0 ? 1.0 : 0.0;
  }
  return solution;
}

std::pair<double, double> static_values(const ContractSpec& contract,
                                        StaticSolution& solution,
                                        const CohortMoments& moments,
                                        const SurvivalCurve& curve,
                                        double gamma_b, double gamma_s) {
  require_inputs(contract, moments, curve);
  if (!(gamma_b > 0.0) || !(gamma_s >= 0.0)) {
    throw validation_error("risk aversions must be positive (buyer) and "
                           "non-negative (seller)");
  }
  double c1 = 0.0;
  double d1 = 0.0;
  cost_and_variance(contract, moments, curve, c1, d1);
  const double u = solution.u_star;
  const int T = contract.horizon;
  const double terminal_growth = std::pow(1.0 + contract.rate, T);

  // Buyer: B_0 R^T minus accumulated benefits net of the hedge, minus the
  // variance penalty on the unhedged share. The mean legs fold into c1.
  double benefit_mean = 0.0;
  {
    const double growth = 1.0 + contract.rate;
    double acc = 1.0;
    for (int i = T; i >= 1; --i) {
      benefit_mean += acc * moments.mean[static_cast<std::size_t>(i)];
      acc *= growth;
    }
  }
  const double buyer = contract.buyer_initial * terminal_growth -
                       benefit_mean - u * c1 -
                       0.5 * gamma_b * (1.0 - u) * (1.0 - u) * d1;
  const double seller = contract.seller_initial * terminal_growth + u * c1 -
                        0.5 * gamma_s * u * u * d1;
  solution.buyer_value = buyer;
  solution.seller_value = seller;
  return {buyer, seller};
}

std::pair<double, double> static_welfare_gains(const ContractSpec& contract,
                                               StaticSolution& solution,
                                               const CohortMoments& moments,
                                               const SurvivalCurve& curve,
                                               double gamma_b, double gamma_s) {
  const auto values =
      static_values(contract, solution, moments, curve, gamma_b, gamma_s);
  double c1 = 0.0;
  double d1 = 0.0;
  cost_and_variance(contract, moments, curve, c1, d1);
  const int T = contract.horizon;
  const double terminal_growth = std::pow(1.0 + contract.rate, T);
  double benefit_mean = 0.0;
  {
    const double growth = 1.0 + contract.rate;
    double acc = 1.0;
    for (int i = T; i >= 1; --i) {
      benefit_mean += acc * moments.mean[static_cast<std::size_t>(i)];
      acc *= growth;
    }
  }
  const double buyer_baseline = contract.buyer_initial * terminal_growth -
                                benefit_mean - 0.5 * gamma_b * d1;
  const double seller_baseline = contract.seller_initial * terminal_growth;
  return {values.first - buyer_baseline, values.second - seller_baseline};
}

}  // namespace longswap
