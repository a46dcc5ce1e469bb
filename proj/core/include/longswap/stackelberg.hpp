#ifndef LONGSWAP_STACKELBERG_HPP
#define LONGSWAP_STACKELBERG_HPP

#include <iosfwd>
#include <utility>
#include <vector>

#include "longswap/cohort.hpp"
#include "longswap/contract.hpp"
#include "longswap/mortality.hpp"

namespace longswap {

// Truncated curtate life expectancy under the tilted curve: the sum of
// multi_year[t]^lambda over t = 1..T.
double life_expectancy(const SurvivalCurve& curve, double lambda);

// A symmetric-in-expectancy ambiguity set around the benchmark. lambda_hi
// solves e(lambda) = (1 - alpha) e(1) and lambda_lo solves
// e(lambda) = (1 + alpha) e(1); since larger lambda shortens lives,
// lambda_lo <= 1 <= lambda_hi. The grid spans [lambda_lo, lambda_hi].
struct AmbiguitySet {
  double alpha = 0.0;
  double lambda_lo = 1.0;
  double lambda_hi = 1.0;
  std::vector<double> grid;             // equally spaced, includes both ends
  double reference_expectancy = 0.0;    // e(1)
};

// Builds the ambiguity set by bisection on the expectancy equation to an
// absolute residual of 1e-8, searching lambda in (0, 100]. alpha = 0 returns
// the degenerate set {1} exactly, without iteration. Throws numerical_error
// if a target expectancy cannot be bracketed, and validation_error for
// alpha outside [0, 1) or a non-positive grid size.
AmbiguitySet lambda_interval(const SurvivalCurve& curve, double alpha,
                             int grid_points = 101);

// Everything the leader-follower evaluation needs besides the loading and
// the prior. The contract's eta field is overridden per evaluation. The
// moments mode applies to every terminal-surplus valuation that uses cohort
// moments (both parties of a static swap and the seller of a dynamic swap);
// the dynamic buyer always follows the per-life recursion. When
// benchmark_response is set the buyer responds under the benchmark prior
// while the seller still evaluates under the candidate prior.
struct MarketContext {
  ContractSpec contract;
  const MortalityScenarioSet* scenarios = nullptr;
  SurvivalCurve curve;
  double gamma_b = 0.0;
  double gamma_s = 0.0;
  MomentMode moments_mode = MomentMode::aggregate;
  bool benchmark_response = false;
  int threads = 1;
};

// One row of a loading sweep, all quantities net of the no-contract
// baseline. buyer_gain is evaluated under the row's worst-case prior, and
// u_summary is the static hedge ratio or the mean of the dynamic hedge path.
struct SweepRow {
  ContractKind kind = ContractKind::static_swap;
  double eta = 0.0;
  double lambda_worst = 1.0;
  double seller_gain = 0.0;
  double buyer_gain = 0.0;
  double u_summary = 0.0;
};

// Result of the leader's loading choice against the worst-case prior.
struct EquilibriumSolution {
  ContractKind kind = ContractKind::static_swap;
  bool no_trade = false;     // set when no loading earns a positive gain
  double eta_star = 0.0;
  double seller_gain = 0.0;  // worst-case gain at eta_star
  double buyer_gain = 0.0;   // buyer gain at eta_star under lambda_worst
  double lambda_worst = 1.0;
  std::vector<SweepRow> sweep;
};

// Seller's gain at one (eta, lambda) cell: the buyer best-responds under the
// cell's prior (or the benchmark when benchmark_response is set), then the
// seller's mean-variance gain is taken under the cell's prior.
double seller_objective(ContractKind kind, double eta, PriorMeasure prior,
                        const MarketContext& context);

// Minimum of seller_objective over the ambiguity grid. Returns the value and
// the minimizing lambda.
std::pair<double, double> worst_case_objective(ContractKind kind, double eta,
                                               const AmbiguitySet& ambiguity,
                                               const MarketContext& context);

// Sweeps eta over [0, eta_max] on a coarse grid, then refines around the
// best grid point by golden-section search until the bracket is narrower
// than refine_tol. The sweep table keeps one row per coarse grid point. The
// no_trade flag is set when even the best refined loading yields a
// non-positive worst-case gain.
EquilibriumSolution optimize_eta(ContractKind kind, const AmbiguitySet& ambiguity,
                                 const MarketContext& context,
                                 double eta_max = 1.0,
                                 double coarse_step = 5e-3,
                                 double refine_tol = 1e-4);

// Buyer gain per grid prior at a fixed loading, as (lambda, gain) pairs.
std::vector<std::pair<double, double>> buyer_welfare_profile(
    ContractKind kind, double eta, const AmbiguitySet& ambiguity,
    const MarketContext& context);

// Writes the sweep table with header
// contract_kind,eta,lambda_worst,seller_gain,buyer_gain,u_summary.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace longswap

#endif  // LONGSWAP_STACKELBERG_HPP
