#ifndef LONGSWAP_STATIC_SOLVER_HPP
#define LONGSWAP_STATIC_SOLVER_HPP

#include <utility>

#include "longswap/cohort.hpp"
#include "longswap/contract.hpp"

namespace longswap {

// Closed-form solution of the buyer's static hedging problem. With
// R = 1 + r,
//
//   c1 = sum_i R^(T-i) ((1+eta) l_0 multi_year[i] - mean[i])
//   d1 = sum_{i,j} R^(T-i) R^(T-j) cov[i][j]
//
// c1 is the discounted expected cost of a full hedge to the buyer under the
// valuation prior (the fixed leg stays priced off the benchmark curve), and
// d1 the discounted variance of the unhedged liability. The optimal constant
// hedge ratio is u* = clamp(1 - c1 / (gamma_b d1), 0, 1); when d1 = 0, u* is
// 1 if hedging has negative cost and 0 otherwise.
struct StaticSolution {
  double u_star = 0.0;
  double c1 = 0.0;
  double d1 = 0.0;
  double buyer_value = 0.0;
  double seller_value = 0.0;
  PriorMeasure prior;
  double eta = 0.0;
};

// Buyer's best response given lives moments under the buyer's prior. Fills
// u_star, c1, d1, prior, and eta; the value fields are completed by
// static_values. The moments must carry the same measure that is passed in.
StaticSolution static_best_response(const ContractSpec& contract,
                                    const CohortMoments& moments,
                                    const SurvivalCurve& curve,
                                    double gamma_b, PriorMeasure prior);

// Mean-variance values of both parties at the solution's hedge ratio:
//
//   buyer  = B_0 R^T - sum_i R^(T-i) (mean[i] + u ((1+eta) l_0 multi[i]
//            - mean[i])) - (gamma_b / 2) (1-u)^2 d1
//   seller = S_0 R^T + u c1 - (gamma_s / 2) u^2 d1
//
// evaluated with the supplied moments, which may carry a different prior
// than the one the buyer responded to. Returns (buyer, seller) and stores
// them in the solution.
std::pair<double, double> static_values(const ContractSpec& contract,
                                        StaticSolution& solution,
                                        const CohortMoments& moments,
                                        const SurvivalCurve& curve,
                                        double gamma_b, double gamma_s);

// Gains over the no-contract baselines: buyer_value minus the unhedged
// buyer value and seller_value minus S_0 R^T.
std::pair<double, double> static_welfare_gains(const ContractSpec& contract,
                                               StaticSolution& solution,
                                               const CohortMoments& moments,
                                               const SurvivalCurve& curve,
                                               double gamma_b, double gamma_s);

}  // namespace longswap

#endif  // LONGSWAP_STATIC_SOLVER_HPP
