#ifndef LONGSWAP_DYNAMIC_SOLVER_HPP
#define LONGSWAP_DYNAMIC_SOLVER_HPP

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "longswap/cohort.hpp"
#include "longswap/contract.hpp"

namespace longswap {

// Time-consistent equilibrium of the buyer's year-by-year hedging problem
// for a dynamic swap, valued along the tilted one-year curve. Writing
// R_t = (1+r)^(T-t-1), p_t for the benchmark one-year survival of year t + 1
// and pt_t = p_t^lambda for its tilted counterpart, the per-period hedge is
//
//   u*_t = clamp(1 - ((1+eta) p_t - pt_t) / (gamma_b R_t (1-pt_t) pt_t)
//                  - f_{t+1} / R_t, 0, 1)
//
// and the value function is linear in the state, V_t(b, l) =
// (1+r)^(T-t) b + F_t l, with terminal f_T = F_T = 0 and
//
//   f_t = pt_t f_{t+1} - R_t (pt_t + u_t ((1+eta) p_t - pt_t))
//   F_t = pt_t F_{t+1} - R_t (pt_t + u_t ((1+eta) p_t - pt_t))
//         - (gamma_b / 2) ((u_t - 1) R_t + f_{t+1})^2 (1-pt_t) pt_t
//
// f_t carries the conditional expectation of B_T per surviving life and F_t
// the equilibrium value per surviving life. When a period has no survival
// variance the hedge is set by the sign of the mean cost alone.
struct DynamicSolution {
  std::vector<double> hedge;      // u_t for t = 0..T-1
  std::vector<double> mean_leg;   // f_t for t = 0..T
  std::vector<double> value_leg;  // F_t for t = 0..T
  double buyer_value = 0.0;       // (1+r)^T B_0 + F_0 l_0
  PriorMeasure prior;
  double eta = 0.0;
};

// Solves the backward recursion above with per-period maximisation.
DynamicSolution dynamic_equilibrium(const ContractSpec& contract,
                                    const SurvivalCurve& curve,
                                    double gamma_b, PriorMeasure prior);

// Runs the same recursion with an externally fixed hedge path instead of the
// per-period argmax. For any fixed path the resulting value equals the plain
// mean-variance value of B_T under point-estimate moments, which is checked
// in the tests via the law of total variance.
DynamicSolution dynamic_fixed_policy_value(const ContractSpec& contract,
                                           const SurvivalCurve& curve,
                                           double gamma_b, PriorMeasure prior,
                                           const std::vector<double>& hedge);

// Seller's mean-variance value of S_T by Monte Carlo over sampled lives
// chains under the given prior. Requires chain_count >= 100. Deterministic
// for fixed (seed, chain_count) under any thread count.
double dynamic_seller_value(const DynamicSolution& solution,
                            const ContractSpec& contract,
                            const MortalityScenarioSet& scenarios,
                            PriorMeasure prior, double gamma_s,
                            std::size_t chain_count, std::uint64_t seed,
                            int threads = 1);

// Seller's mean-variance value of S_T in closed form. S_T is affine in the
// lives path once the hedge path is fixed, so the value follows from the
// cohort moments directly; the moment mode decides how much diversifiable
// risk the seller prices.
double dynamic_seller_value_analytic(const DynamicSolution& solution,
                                     const ContractSpec& contract,
                                     const CohortMoments& moments,
                                     const SurvivalCurve& curve,
                                     double gamma_s);

// Gains over the no-contract baselines: the buyer against the u = 0 fixed
// policy under the solution's prior, the seller against S_0 (1+r)^T with the
// analytic value under the supplied moments.
std::pair<double, double> dynamic_welfare_gains(const ContractSpec& contract,
                                                const DynamicSolution& solution,
                                                const SurvivalCurve& curve,
                                                const CohortMoments& seller_moments,
                                                double gamma_b, double gamma_s);

// Writes "t,u,f,F" rows, one per period plus the terminal row with an empty
// hedge column.
void write_hedge_path_csv(std::ostream& out, const DynamicSolution& solution);

}  // namespace longswap

#endif  // LONGSWAP_DYNAMIC_SOLVER_HPP
