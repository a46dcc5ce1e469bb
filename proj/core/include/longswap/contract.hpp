#ifndef LONGSWAP_CONTRACT_HPP
#define LONGSWAP_CONTRACT_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "longswap/cohort.hpp"
#include "longswap/mortality.hpp"

namespace longswap {

// The two index-based longevity swap designs. A static swaps fixes the whole
// payment schedule at inception from the multi-year survival curve; a
// dynamic swap resets the fixed leg every year from the realized lives and
// the one-year survival curve. Fixed legs are always priced off the
// benchmark curve regardless of the prior used for valuation.
enum class ContractKind { static_swap, dynamic_swap };

const char* to_string(ContractKind kind);

// Economic terms shared by both designs. In projection year t the buyer pays
// the floating benefit l_t and receives, per unit of hedge, the floating leg
// l_t against the loaded fixed leg (1 + eta) * lhat_t.
struct ContractSpec {
  ContractKind kind = ContractKind::static_swap;
  double eta = 0.0;     // proportional risk loading, >= 0
  double rate = 0.0;    // annual interest rate, > -1
  int horizon = 0;      // T, must match the cohort horizon
  CohortSpec cohort;
  double buyer_initial = 0.0;   // B_0
  double seller_initial = 0.0;  // S_0

  void validate() const;
};

// Terminal surpluses of one realized path together with the inputs that
// produced them. Accumulation satisfies, up to round-off,
//   B_T + S_T + sum_t l_t (1+r)^(T-t) = (B_0 + S_0) (1+r)^T
// because the swap legs only move money between the two parties.
struct SurplusSample {
  double buyer_terminal = 0.0;
  double seller_terminal = 0.0;
  std::vector<double> hedge_path;        // u_0 .. u_{T-1}
  std::vector<std::int64_t> lives_path;  // l_0 .. l_T
};

// Fixed leg of a static swap: entry t is l_0 * multi_year[t] for t in
// [1, horizon], entry 0 is zero.
std::vector<double> fixed_payments_static(const ContractSpec& contract,
                                          const SurvivalCurve& curve);

// Fixed leg of a dynamic swap for year t given the lives at t - 1, namely
// one_year[t] * lives_prev.
double fixed_payment_dynamic(const ContractSpec& contract,
                             const SurvivalCurve& curve, int t,
                             double lives_prev);

// Rolls the buyer and seller surplus accounts forward along one lives path
// under the hedge path u_0..u_{T-1}. The hedge values must lie in [0, 1] and
// the lives path must start at the cohort count and be non-increasing and
// non-negative; violations raise validation_error.
SurplusSample terminal_surpluses(const ContractSpec& contract,
                                 const std::vector<double>& hedge,
                                 const std::vector<std::int64_t>& lives,
                                 const SurvivalCurve& curve);

// Terminal surplus written as an affine function of the lives path:
//   value = constant + sum_{t=0}^{T} weights[t] * l_t.
// Exposing the representation lets moment-based valuation reuse one code
// path for both parties and any moment mode.
struct AffineTerminal {
  double constant = 0.0;
  std::vector<double> weights;  // size horizon + 1
};

AffineTerminal buyer_terminal_affine(const ContractSpec& contract,
                                     const std::vector<double>& hedge,
                                     const SurvivalCurve& curve);
AffineTerminal seller_terminal_affine(const ContractSpec& contract,
                                      const std::vector<double>& hedge,
                                      const SurvivalCurve& curve);

// Mean-variance certainty equivalent E[X] - (gamma / 2) Var[X] of an affine
// terminal value under the given lives moments.
double mean_variance_value(const AffineTerminal& terminal,
                           const CohortMoments& moments, double gamma);

// Writes "t,fixed_payment" rows for a static swap schedule.
void write_fixed_leg_csv(std::ostream& out, const ContractSpec& contract,
                         const SurvivalCurve& curve);

// Writes "t,mean,q2.5,q97.5" rows for the dynamic fixed leg across sampled
// lives paths.
void write_fixed_leg_fan_csv(std::ostream& out, const ContractSpec& contract,
                             const SurvivalCurve& curve,
                             const CohortPathSample& sample);

}  // namespace longswap

#endif  // LONGSWAP_CONTRACT_HPP
