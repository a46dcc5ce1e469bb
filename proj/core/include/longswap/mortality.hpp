#ifndef LONGSWAP_MORTALITY_HPP
#define LONGSWAP_MORTALITY_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace longswap {

// Parameters of an age-period-cohort-improvement mortality model fitted to
// historical data. The force of mortality in a projected cell is
//
//   ln m = beta1[age] + beta2[age] * (year - h_bar) + kappa_year + theta
//          + sigma_omega[age] * omega
//
// where kappa follows a random walk seeded at kappa_last in base_year, theta
// is the cohort effect of the book being projected, and omega is cell-level
// noise. All per-age arrays span [age_min, age_max] inclusive.
struct ApciParameters {
  int age_min = 0;
  int age_max = 0;
  std::vector<double> beta1;        // log-level of mortality by age
  std::vector<double> beta2;        // period-trend loading by age
  std::vector<double> sigma_omega;  // cell noise standard deviation by age
  double kappa_last = 0.0;          // period effect in the last fitted year
  double sigma_kappa = 0.0;         // random walk innovation standard deviation
  double theta = 0.0;               // cohort effect
  double h_bar = 0.0;               // centering year of the period trend
  int base_year = 0;                // last fitted calendar year

  int age_count() const { return age_max - age_min + 1; }

  // Throws validation_error unless the age range is non-empty, all arrays
  // span it exactly, the standard deviations are non-negative, and h_bar
  // does not exceed the last fitted year.
  void validate() const;
};

// Reads parameters from a JSON file whose keys mirror the field names; the
// per-age arrays are objects keyed by the integer age.
ApciParameters load_apci_parameters(const std::filesystem::path& file);
void save_apci_parameters(const ApciParameters& params,
                          const std::filesystem::path& file);

// A set of simulated mortality scenarios for one cohort. Entry (k, t) is the
// probability that a life aged initial_age + t at the start of projection
// year t + 1 survives that year, under scenario k. Values lie in (0, 1].
struct MortalityScenarioSet {
  int initial_age = 0;
  int horizon = 0;                // number of projection years T
  std::size_t path_count = 0;     // number of scenarios K
  std::uint64_t seed = 0;         // seed the set was generated from
  std::vector<double> survival;   // path-major, path_count * horizon entries

  double at(std::size_t path, int t) const {
    return survival[path * static_cast<std::size_t>(horizon) +
                    static_cast<std::size_t>(t)];
  }
  double& at(std::size_t path, int t) {
    return survival[path * static_cast<std::size_t>(horizon) +
                    static_cast<std::size_t>(t)];
  }

  void validate() const;
};

// Survival estimates aggregated over a scenario set. Index t is the duration
// in years, with entry 0 fixed at one. multi_year[t] averages the t-year
// path survival products over scenarios; one_year[t] averages the single
// year survival of projection year t. The product of one_year entries does
// not reproduce multi_year in general, so both are kept.
struct SurvivalCurve {
  int initial_age = 0;
  int horizon = 0;
  std::vector<double> multi_year;  // size horizon + 1, leading 1.0
  std::vector<double> one_year;    // size horizon + 1, leading 1.0
};

// Simulates K scenarios of one-year survival probabilities for a cohort aged
// x at the valuation date over T years. Requires x + T <= age_max + 1 and
// K >= 1. Output is a pure function of (params, x, T, K, seed); the thread
// count only changes wall time.
MortalityScenarioSet simulate_scenarios(const ApciParameters& params, int x,
                                        int T, std::size_t K,
                                        std::uint64_t seed, int threads = 1);

// Averages path survival into a curve. Uses streaming means, one pass.
SurvivalCurve estimate_curve(const MortalityScenarioSet& scenarios);

// Binary round trip for scenario sets. Little-endian layout: magic "LSWP",
// u16 version, u16 initial age, u32 horizon, u32 path count, u64 seed, then
// path-major float64 survival values. Loading validates the header, the
// payload size, and that every probability lies in (0, 1].
void save_scenarios(const MortalityScenarioSet& scenarios,
                    const std::filesystem::path& file);
MortalityScenarioSet load_scenarios(const std::filesystem::path& file);

}  // namespace longswap

#endif  // LONGSWAP_MORTALITY_HPP
