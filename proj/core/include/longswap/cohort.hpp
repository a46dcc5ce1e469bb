#ifndef LONGSWAP_COHORT_HPP
#define LONGSWAP_COHORT_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "longswap/mortality.hpp"

namespace longswap {

// A closed book of identical lives entering at the same age.
struct CohortSpec {
  int initial_age = 0;
  std::int64_t initial_count = 0;  // lives at the valuation date, >= 1
  int horizon = 0;                 // projection years, >= 1

  void validate() const;
};

// A probability measure from the one-parameter family indexed by lambda > 0.
// Under measure lambda every one-year survival probability q is replaced by
// q^lambda, path by path; lambda = 1 is the benchmark estimate, lambda < 1
// shifts mass toward longer lives, lambda > 1 toward shorter ones. Applying
// lambda1 then lambda2 equals applying lambda1 * lambda2.
struct PriorMeasure {
  double lambda = 1.0;

  bool benchmark() const { return lambda == 1.0; }
  void validate() const;
};

// How the first two moments of the lives process are assembled.
//
//   mixture:        scenario mixture of binomial chains; the covariance is
//                   the conditional binomial part averaged over scenarios
//                   plus the covariance of scenario survival products.
//   point_estimate: a single binomial chain along the tilted one-year curve,
//                   ignoring scenario spread.
//   aggregate:      the large-book limit; lives per scenario follow the
//                   survival product exactly, so only the scenario spread
//                   remains and the covariance scales with the squared count.
enum class MomentMode { mixture, point_estimate, aggregate };

const char* to_string(MomentMode mode);

// First and second moments of the lives path l_0, ..., l_T under a prior.
// Index 0 is the deterministic initial count, so mean[0] = initial_count and
// the covariance entries touching index 0 are zero.
struct CohortMoments {
  int horizon = 0;
  std::vector<double> mean;  // size horizon + 1
  std::vector<double> cov;   // (horizon + 1)^2, row-major
  PriorMeasure measure;
  MomentMode mode = MomentMode::mixture;

  double cov_at(int i, int j) const {
    return cov[static_cast<std::size_t>(i) *
                   static_cast<std::size_t>(horizon + 1) +
               static_cast<std::size_t>(j)];
  }
  double& cov_at(int i, int j) {
    return cov[static_cast<std::size_t>(i) *
                   static_cast<std::size_t>(horizon + 1) +
               static_cast<std::size_t>(j)];
  }
};

// Integer lives paths sampled under a prior, chain-major with horizon + 1
// entries per chain; column 0 holds the initial count.
struct CohortPathSample {
  std::size_t chain_count = 0;
  int horizon = 0;
  std::vector<std::int64_t> lives;

  std::int64_t at(std::size_t chain, int t) const {
    return lives[chain * static_cast<std::size_t>(horizon + 1) +
                 static_cast<std::size_t>(t)];
  }
};

// Reweights a scenario set to the given prior by raising every one-year
// survival probability to the power lambda. The seed and shape carry over.
MortalityScenarioSet tilt(const MortalityScenarioSet& scenarios,
                          PriorMeasure prior);

// Expected lives path under the prior: initial_count times the scenario
// average of tilted survival products. Size horizon + 1, entry 0 is the
// initial count.
std::vector<double> cohort_mean(const CohortSpec& cohort,
                                const MortalityScenarioSet& scenarios,
                                PriorMeasure prior);

// Full first and second moments of the lives path under the prior, assembled
// per the requested mode. The returned covariance is symmetric and positive
// semidefinite up to round-off.
CohortMoments cohort_covariance(const CohortSpec& cohort,
                                const MortalityScenarioSet& scenarios,
                                PriorMeasure prior,
                                MomentMode mode = MomentMode::mixture);

// Simulates chain_count integer lives paths: each chain first draws one
// scenario uniformly, then steps l_t ~ Binomial(l_{t-1}, q_t^lambda) year by
// year. Reproducible for fixed (seed, chain index) under any thread count.
CohortPathSample sample_cohort_paths(const CohortSpec& cohort,
                                     const MortalityScenarioSet& scenarios,
                                     PriorMeasure prior,
                                     std::size_t chain_count,
                                     std::uint64_t seed, int threads = 1);

// Largest absolute gap over durations between the scenario average of tilted
// survival products and the tilted average product. Zero for lambda = 1 or a
// single scenario; reported so callers can see how far the two orderings of
// tilt and averaging drift apart on a given set.
double tilt_jensen_gap(const MortalityScenarioSet& scenarios,
                       PriorMeasure prior);

}  // namespace longswap

#endif  // LONGSWAP_COHORT_HPP
