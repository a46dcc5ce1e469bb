#include "longswap/cohort.hpp"

#include <cmath>
#include <cstdlib>

#include "longswap/errors.hpp"
#include "longswap/parallel.hpp"
#include "longswap/rng.hpp"

namespace longswap {

namespace {

void require_compatible(const CohortSpec& cohort,
                        const MortalityScenarioSet& scenarios) {
  cohort.validate();
  scenarios.validate();
  if (cohort.horizon != scenarios.horizon) {
    throw validation_error("cohort horizon does not match the scenario set");
  }
  if (cohort.initial_age != scenarios.initial_age) {
    throw validation_error("cohort age does not match the scenario set");
  }
}

// Tilted survival products per path: row k holds prod_{s<=t} q_{k,s}^lambda
// for t = 0..T, with the leading entry fixed at one.
std::vector<double> tilted_products(const MortalityScenarioSet& scenarios,
                                    double lambda) {
  const int T = scenarios.horizon;
  const std::size_t K = scenarios.path_count;
  std::vector<double> products(K * static_cast<std::size_t>(T + 1));
  for (std::size_t k = 0; k < K; ++k) {
    double* row = products.data() + k * static_cast<std::size_t>(T + 1);
    row[0] = 1.0;
    for (int t = 1; t <= T; ++t) {
      const double q = scenarios.at(k, t - 1);
      row[t] = row[t - 1] * (lambda == 1.0 ? q : std::pow(q, lambda));
    }
  }
  return products;
}

}  // namespace

void CohortSpec::validate() const {
  if (initial_age < 0) throw validation_error("cohort: negative initial age");
  if (initial_count < 1) {
    throw validation_error("cohort: initial count must be >= 1");
  }
  if (horizon < 1) throw validation_error("cohort: horizon must be >= 1");
}

void PriorMeasure::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw validation_error("prior measure: lambda must be positive and finite");
  }
}

const char* to_string(MomentMode mode) {
  switch (mode) {
    case MomentMode::mixture: return "mixture";
    case MomentMode::point_estimate: return "point-estimate";
    case MomentMode::aggregate: return "aggregate";
  }
  return "unknown";
}

MortalityScenarioSet tilt(const MortalityScenarioSet& scenarios,
                          PriorMeasure prior) {
  prior.validate();
  scenarios.validate();
  if (prior.benchmark()) return scenarios;
  MortalityScenarioSet tilted = scenarios;
  for (double& q : tilted.survival) q = std::pow(q, prior.lambda);
  return tilted;
}

std::vector<double> cohort_mean(const CohortSpec& cohort,
                                const MortalityScenarioSet& scenarios,
                                PriorMeasure prior) {
  require_compatible(cohort, scenarios);
  prior.validate();
  const int T = scenarios.horizon;
  const std::size_t K = scenarios.path_count;
  const auto products = tilted_products(scenarios, prior.lambda);
  std::vector<double> mean(static_cast<std::size_t>(T) + 1, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const double* row = products.data() + k * static_cast<std::size_t>(T + 1);
    for (int t = 0; t <= T; ++t) mean[static_cast<std::size_t>(t)] += row[t];
  }
  const double scale =
      static_cast<double>(cohort.initial_count) / static_cast<double>(K);
  for (double& m : mean) m *= scale;
  return mean;
}

CohortMoments cohort_covariance(const CohortSpec& cohort,
                                const MortalityScenarioSet& scenarios,
                                PriorMeasure prior, MomentMode mode) {
  require_compatible(cohort, scenarios);
  prior.validate();
  const int T = scenarios.horizon;
  const std::size_t K = scenarios.path_count;
  const auto count = static_cast<double>(cohort.initial_count);

  CohortMoments moments;
  moments.horizon = T;
  moments.measure = prior;
  moments.mode = mode;
  moments.mean.assign(static_cast<std::size_t>(T) + 1, 0.0);
  moments.cov.assign((static_cast<std::size_t>(T) + 1) *
                         (static_cast<std::size_t>(T) + 1),
                     0.0);
  moments.mean[0] = count;

  if (mode == MomentMode::point_estimate) {
    // A single binomial chain along the tilted one-year curve. The chain
    // identity Cov(l_i, l_j) = l_0 P_j (1 - P_i) for i <= j follows from
    // conditioning l_j on l_i; it degrades gracefully as P_i approaches 0.
    const SurvivalCurve curve = estimate_curve(scenarios);
    std::vector<double> chain(static_cast<std::size_t>(T) + 1, 1.0);
    for (int t = 1; t <= T; ++t) {
      const double p = prior.benchmark()
                           ? curve.one_year[static_cast<std::size_t>(t)]
                           : std::pow(curve.one_year[static_cast<std::size_t>(t)],
                                      prior.lambda);
      chain[static_cast<std::size_t>(t)] =
          chain[static_cast<std::size_t>(t - 1)] * p;
      moments.mean[static_cast<std::size_t>(t)] =
          count * chain[static_cast<std::size_t>(t)];
    }
    for (int i = 1; i <= T; ++i) {
      for (int j = i; j <= T; ++j) {
        const double cov = count * chain[static_cast<std::size_t>(j)] *
                           (1.0 - chain[static_cast<std::size_t>(i)]);
        moments.cov_at(i, j) = cov;
        moments.cov_at(j, i) = cov;
      }
    }
    return moments;
  }

  const auto products = tilted_products(scenarios, prior.lambda);
  std::vector<double> avg(static_cast<std::size_t>(T) + 1, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const double* row = products.data() + k * static_cast<std::size_t>(T + 1);
    for (int t = 0; t <= T; ++t) avg[static_cast<std::size_t>(t)] += row[t];
  }
  for (double& a : avg) a /= static_cast<double>(K);
  for (int t = 1; t <= T; ++t) {
    moments.mean[static_cast<std::size_t>(t)] =
        count * avg[static_cast<std::size_t>(t)];
  }

  // Scenario spread of the survival products, population-normalized, done in
  // two passes so the centering does not lose precision.
  for (int i = 1; i <= T; ++i) {
    for (int j = i; j <= T; ++j) {
      double systematic = 0.0;
      double conditional = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const double* row =
            products.data() + k * static_cast<std::size_t>(T + 1);
        const double di = row[i] - avg[static_cast<std::size_t>(i)];
        const double dj = row[j] - avg[static_cast<std::size_t>(j)];
        systematic += di * dj;
        conditional += row[j] * (1.0 - row[i]);
      }
      systematic *= count * count / static_cast<double>(K);
      conditional *= count / static_cast<double>(K);
      const double cov = mode == MomentMode::aggregate
                             ? systematic
                             : systematic + conditional;
      moments.cov_at(i, j) = cov;
      moments.cov_at(j, i) = cov;
    }
  }
  return moments;
}

CohortPathSample sample_cohort_paths(const CohortSpec& cohort,
                                     const MortalityScenarioSet& scenarios,
                                     PriorMeasure prior,
                                     std::size_t chain_count,
                                     std::uint64_t seed, int threads) {
  require_compatible(cohort, scenarios);
  prior.validate();
  if (chain_count < 1) {
    throw validation_error("sample_cohort_paths: need at least one chain");
  }
  const int T = scenarios.horizon;
  const std::size_t K = scenarios.path_count;

  CohortPathSample sample;
  sample.chain_count = chain_count;
  sample.horizon = T;
  sample.lives.resize(chain_count * static_cast<std::size_t>(T + 1));

  parallel_for(chain_count, resolve_thread_count(threads), [&](std::size_t n) {
    std::int64_t* row =
        sample.lives.data() + n * static_cast<std::size_t>(T + 1);
    const double pick =
        CounterRng(seed, rng_stream::scenario_pick, n).uniform_at(0);
    std::size_t k = static_cast<std::size_t>(pick * static_cast<double>(K));
    if (k >= K) k = K - 1;
    CounterRng deaths(seed, rng_stream::cohort_lives, n);
    row[0] = cohort.initial_count;
    for (int t = 1; t <= T; ++t) {
      const double q = scenarios.at(k, t - 1);
      const double p = prior.benchmark() ? q : std::pow(q, prior.lambda);
      row[t] = binomial_from_uniform(
          deaths.uniform_at(static_cast<std::uint64_t>(t - 1)), row[t - 1], p);
    }
  });
  return sample;
}

double tilt_jensen_gap(const MortalityScenarioSet& scenarios,
                       PriorMeasure prior) {
  scenarios.validate();
  prior.validate();
  const int T = scenarios.horizon;
  const std::size_t K = scenarios.path_count;
  const auto products = tilted_products(scenarios, prior.lambda);
  const auto plain = tilted_products(scenarios, 1.0);
  double gap = 0.0;
  for (int t = 1; t <= T; ++t) {
    double avg_tilted = 0.0;
    double avg_plain = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      avg_tilted += products[k * static_cast<std::size_t>(T + 1) +
                             static_cast<std::size_t>(t)];
      avg_plain += plain[k * static_cast<std::size_t>(T + 1) +
                         static_cast<std::size_t>(t)];
    }
    avg_tilted /= static_cast<double>(K);
    avg_plain /= static_cast<double>(K);
    const double diff = std::abs(avg_tilted - std::pow(avg_plain, prior.lambda));
    if (diff > gap) gap = diff;
  }
  return gap;
}

}  // namespace longswap
