#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "longswap/errors.hpp"
#include "longswap/mortality.hpp"
#include "support/test_util.hpp"

using namespace longswap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ApciParameters flat_params(double beta1, int age_min = 60, int age_max = 80) {
  ApciParameters params;
  params.age_min = age_min;
  params.age_max = age_max;
  params.kappa_last = 0.0;
  params.sigma_kappa = 0.0;
  params.theta = 0.0;
  params.h_bar = 2020.0;
  params.base_year = 2020;
  for (int a = age_min; a <= age_max; ++a) {
    params.beta1.push_back(beta1);
    params.beta2.push_back(0.0);
    params.sigma_omega.push_back(0.0);
  }
  return params;
}

MortalityScenarioSet constant_set(double q, std::size_t K, int T) {
  MortalityScenarioSet set;
  set.initial_age = 65;
  set.horizon = T;
  set.path_count = K;
  set.seed = 1;
  set.survival.assign(K * static_cast<std::size_t>(T), q);
  return set;
}

}  // namespace

// ============================================================================
// Scenario simulation
// ============================================================================

TEST_CASE("switching all randomness off collapses every path to the formula",
          "[mortality]") {
  ApciParameters params = flat_params(-4.0);
  params.kappa_last = -0.05;
  params.theta = -0.02;
  const MortalityScenarioSet set = simulate_scenarios(params, 62, 10, 5, 99);
  const double expected = std::exp(-std::exp(-4.0 - 0.05 - 0.02));
  for (std::size_t k = 0; k < set.path_count; ++k)
    for (int t = 0; t < set.horizon; ++t)
      REQUIRE_THAT(set.at(k, t), WithinRel(expected, 1e-15));
}

TEST_CASE("a vanishing hazard gives survival exactly one", "[mortality]") {
  const ApciParameters params = flat_params(-700.0);
  const MortalityScenarioSet set = simulate_scenarios(params, 60, 5, 3, 1);
  for (std::size_t k = 0; k < set.path_count; ++k)
    for (int t = 0; t < set.horizon; ++t) REQUIRE(set.at(k, t) == 1.0);
}

TEST_CASE("simulation is a pure function of parameters and seed",
          "[mortality]") {
  const ApciParameters params = load_apci_parameters(
      test_util::fixture_params_path());
  const MortalityScenarioSet a = simulate_scenarios(params, 65, 12, 40, 7, 1);
  const MortalityScenarioSet b = simulate_scenarios(params, 65, 12, 40, 7, 4);
  REQUIRE(a.survival == b.survival);
  const MortalityScenarioSet c = simulate_scenarios(params, 65, 12, 40, 8, 1);
  REQUIRE(a.survival != c.survival);
}

TEST_CASE("raising the log-level of mortality at one age lowers its survival",
          "[mortality]") {
  ApciParameters params = flat_params(-4.0);
  const MortalityScenarioSet base = simulate_scenarios(params, 60, 10, 4, 3);
  params.beta1[5] += 0.5;  // age 65, reached at projection year 6
  const MortalityScenarioSet bumped = simulate_scenarios(params, 60, 10, 4, 3);
  for (std::size_t k = 0; k < base.path_count; ++k) {
    for (int t = 0; t < base.horizon; ++t) {
      if (t == 5)
        REQUIRE(bumped.at(k, t) < base.at(k, t));
      else
        REQUIRE(bumped.at(k, t) == base.at(k, t));
    }
  }
}

TEST_CASE("the age window is enforced", "[mortality]") {
  const ApciParameters params = flat_params(-4.0, 60, 80);
  CHECK_THROWS_AS(simulate_scenarios(params, 60, 22, 2, 1), validation_error);
  CHECK_NOTHROW(simulate_scenarios(params, 60, 21, 2, 1));
  CHECK_THROWS_AS(simulate_scenarios(params, 60, 5, 0, 1), validation_error);
}

TEST_CASE("parameter arrays must span the age range", "[mortality]") {
  ApciParameters params = flat_params(-4.0);
  params.beta2.pop_back();
  CHECK_THROWS_AS(params.validate(), validation_error);
  params = flat_params(-4.0);
  params.sigma_kappa = -0.1;
  CHECK_THROWS_AS(params.validate(), validation_error);
  params = flat_params(-4.0);
  params.h_bar = 2021.0;  // beyond the last fitted year
  CHECK_THROWS_AS(params.validate(), validation_error);
}

TEST_CASE("every simulated probability lies in the half-open unit interval",
          "[mortality]") {
  const ApciParameters params =
      load_apci_parameters(test_util::fixture_params_path());
  const MortalityScenarioSet set = simulate_scenarios(params, 65, 35, 50, 5);
  for (double q : set.survival) {
    REQUIRE(q > 0.0);
    REQUIRE(q <= 1.0);
  }
}

// ============================================================================
// Curve estimation
// ============================================================================

TEST_CASE("a single deterministic path averages to its own products",
          "[mortality]") {
  const SurvivalCurve curve = estimate_curve(constant_set(0.9, 1, 3));
  REQUIRE(curve.multi_year.size() == 4);
  CHECK(curve.multi_year[0] == 1.0);
  CHECK_THAT(curve.multi_year[1], WithinRel(0.9, 1e-15));
  CHECK_THAT(curve.multi_year[2], WithinRel(0.81, 1e-15));
  CHECK_THAT(curve.multi_year[3], WithinRel(0.729, 1e-15));
  CHECK_THAT(curve.one_year[2], WithinRel(0.9, 1e-15));
}

TEST_CASE("two paths average entrywise", "[mortality]") {
  MortalityScenarioSet set = constant_set(1.0, 2, 1);
  set.at(1, 0) = 0.5;
  const SurvivalCurve curve = estimate_curve(set);
  CHECK_THAT(curve.multi_year[1], WithinRel(0.75, 1e-15));
}

TEST_CASE("curve estimation matches an independent long double re-average",
          "[mortality]") {
  const MortalityScenarioSet set = test_util::load_fixture_scenarios();
  const SurvivalCurve curve = estimate_curve(set);
  const int T = set.horizon;
  for (int t = 1; t <= T; ++t) {
    long double multi = 0.0L;
    long double one = 0.0L;
    for (std::size_t k = 0; k < set.path_count; ++k) {
      long double product = 1.0L;
      for (int s = 0; s < t; ++s) product *= set.at(k, s);
      multi += product;
      one += set.at(k, t - 1);
    }
    multi /= static_cast<long double>(set.path_count);
    one /= static_cast<long double>(set.path_count);
    REQUIRE_THAT(curve.multi_year[static_cast<std::size_t>(t)],
                 WithinAbs(static_cast<double>(multi), 1e-12));
    REQUIRE_THAT(curve.one_year[static_cast<std::size_t>(t)],
                 WithinAbs(static_cast<double>(one), 1e-12));
  }
}

TEST_CASE("multi-year survival is non-increasing and positive", "[mortality]") {
  const SurvivalCurve curve =
      estimate_curve(test_util::load_fixture_scenarios());
  for (std::size_t t = 1; t < curve.multi_year.size(); ++t) {
    REQUIRE(curve.multi_year[t] > 0.0);
    REQUIRE(curve.multi_year[t] <= curve.multi_year[t - 1]);
  }
}

TEST_CASE("concatenating two scenario sets averages by path count",
          "[mortality]") {
  const ApciParameters params =
      load_apci_parameters(test_util::fixture_params_path());
  const MortalityScenarioSet a = simulate_scenarios(params, 65, 8, 30, 11);
  const MortalityScenarioSet b = simulate_scenarios(params, 65, 8, 50, 12);
  MortalityScenarioSet both = a;
  both.path_count = a.path_count + b.path_count;
  both.survival.insert(both.survival.end(), b.survival.begin(),
                       b.survival.end());
  const SurvivalCurve ca = estimate_curve(a);
  const SurvivalCurve cb = estimate_curve(b);
  const SurvivalCurve cboth = estimate_curve(both);
  const double wa = 30.0 / 80.0;
  const double wb = 50.0 / 80.0;
  for (std::size_t t = 1; t < cboth.multi_year.size(); ++t) {
    REQUIRE_THAT(cboth.multi_year[t],
                 WithinAbs(wa * ca.multi_year[t] + wb * cb.multi_year[t],
                           1e-12));
    REQUIRE_THAT(cboth.one_year[t],
                 WithinAbs(wa * ca.one_year[t] + wb * cb.one_year[t], 1e-12));
  }
}

// ============================================================================
// Persistence
// ============================================================================

TEST_CASE("scenario files round-trip bit for bit", "[mortality]") {
  const auto dir = test_util::make_scratch_dir("mortality");
  const ApciParameters params =
      load_apci_parameters(test_util::fixture_params_path());
  const MortalityScenarioSet set = simulate_scenarios(params, 65, 20, 25, 4);
  const auto file = dir / "set.lswp";
  save_scenarios(set, file);
  const MortalityScenarioSet loaded = load_scenarios(file);
  CHECK(loaded.initial_age == set.initial_age);
  CHECK(loaded.horizon == set.horizon);
  CHECK(loaded.path_count == set.path_count);
  CHECK(loaded.seed == set.seed);
  CHECK(loaded.survival == set.survival);
  std::filesystem::remove_all(dir);
}

TEST_CASE("parameter files round-trip through JSON", "[mortality]") {
  const auto dir = test_util::make_scratch_dir("params");
  const ApciParameters params =
      load_apci_parameters(test_util::fixture_params_path());
  const auto file = dir / "params.json";
  save_apci_parameters(params, file);
  const ApciParameters loaded = load_apci_parameters(file);
  CHECK(loaded.beta1 == params.beta1);
  CHECK(loaded.beta2 == params.beta2);
  CHECK(loaded.sigma_omega == params.sigma_omega);
  CHECK(loaded.kappa_last == params.kappa_last);
  CHECK(loaded.sigma_kappa == params.sigma_kappa);
  CHECK(loaded.theta == params.theta);
  CHECK(loaded.h_bar == params.h_bar);
  CHECK(loaded.base_year == params.base_year);
  std::filesystem::remove_all(dir);
}

TEST_CASE("truncated scenario files are rejected", "[mortality]") {
  const auto dir = test_util::make_scratch_dir("truncated");
  const auto file = dir / "broken.lswp";
  const MortalityScenarioSet set = constant_set(0.9, 3, 4);
  save_scenarios(set, file);
  const std::string bytes = test_util::read_file(file);

  std::ofstream(file, std::ios::binary)
      << bytes.substr(0, bytes.size() - 13);
  CHECK_THROWS_AS(load_scenarios(file), io_error);

  std::ofstream(file, std::ios::binary) << bytes.substr(0, 6);
  CHECK_THROWS_AS(load_scenarios(file), io_error);

  std::string wrong_magic = bytes;
  wrong_magic[0] = 'X';
  std::ofstream(file, std::ios::binary) << wrong_magic;
  CHECK_THROWS_AS(load_scenarios(file), io_error);

  CHECK_THROWS_AS(load_scenarios(dir / "missing.lswp"), io_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("the bundled scenario fixture loads with its recorded shape",
          "[mortality]") {
  const MortalityScenarioSet set = test_util::load_fixture_scenarios();
  CHECK(set.path_count == 2000);
  CHECK(set.horizon == 35);
  CHECK(set.initial_age == 65);
  CHECK_NOTHROW(set.validate());
}

TEST_CASE("the bundled fixture reproduces from its parameters and seed",
          "[mortality]") {
  const MortalityScenarioSet fixture = test_util::load_fixture_scenarios();
  const ApciParameters params =
      load_apci_parameters(test_util::fixture_params_path());
  const MortalityScenarioSet regenerated = simulate_scenarios(
      params, fixture.initial_age, fixture.horizon, fixture.path_count,
      fixture.seed, 2);
  REQUIRE(regenerated.survival == fixture.survival);
}
