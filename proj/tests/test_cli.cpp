#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "longswap/mortality.hpp"
#include "support/test_util.hpp"

using namespace longswap;

namespace {

struct CliRun {
  int exit_code;
  std::string output;
};

CliRun run_cli(const std::string& arguments) {
  static const std::filesystem::path log_dir =
      test_util::make_scratch_dir("cli_logs");
  static int counter = 0;
  std::ostringstream name;
  name << "run_" << counter++ << ".log";
  const std::filesystem::path log = log_dir / name.str();
  const int code = test_util::run_command(test_util::cli_path() + " " +
                                          arguments, log);
  return CliRun{code, test_util::read_file(log)};
}

// A small simulated scenario file shared by the read-only CLI tests.
const std::filesystem::path& shared_scenarios() {
  static const std::filesystem::path file = [] {
    const std::filesystem::path dir = test_util::make_scratch_dir("cli_sim");
    const std::filesystem::path out = dir / "small.lswp";
    std::ostringstream command;
    command << "simulate --params " << test_util::fixture_params_path()
            << " --age 65 --horizon 12 --paths 150 --seed 4242 --out " << out;
    const CliRun run = run_cli(command.str());
    REQUIRE(run.exit_code == 0);
    return out;
  }();
  return file;
}

std::vector<std::vector<std::string>> read_csv(
    const std::filesystem::path& file) {
  std::vector<std::vector<std::string>> rows;
  for (const std::string& line :
       test_util::split_lines(test_util::read_file(file)))
    rows.push_back(test_util::split_csv_row(line));
  return rows;
}

}  // namespace

// ============================================================================
// simulate
// ============================================================================

TEST_CASE("simulate writes a scenario file that loads back", "[cli]") {
  const MortalityScenarioSet set = load_scenarios(shared_scenarios());
  CHECK(set.path_count == 150);
  CHECK(set.horizon == 12);
  CHECK(set.initial_age == 65);
  CHECK(set.seed == 4242);
}

TEST_CASE("simulate is deterministic for a fixed seed", "[cli]") {
  const std::filesystem::path dir = test_util::make_scratch_dir("cli_seed");
  for (const std::string name : {"a.lswp", "b.lswp"}) {
    std::ostringstream command;
    command << "simulate --params " << test_util::fixture_params_path()
            << " --age 65 --horizon 12 --paths 150 --seed 4242 --out "
            << (dir / name);
    REQUIRE(run_cli(command.str()).exit_code == 0);
  }
  const std::string a = test_util::read_file(dir / "a.lswp");
  REQUIRE(!a.empty());
  CHECK(a == test_util::read_file(dir / "b.lswp"));
  CHECK(a == test_util::read_file(shared_scenarios()));
}

TEST_CASE("simulate rejects a zero path count", "[cli]") {
  const std::filesystem::path dir = test_util::make_scratch_dir("cli_zero");
  std::ostringstream command;
  command << "simulate --params " << test_util::fixture_params_path()
          << " --age 65 --horizon 12 --paths 0 --out " << (dir / "z.lswp");
  CHECK(run_cli(command.str()).exit_code == 2);
}

// ============================================================================
// sweep
// ============================================================================

TEST_CASE("a risk-neutral seller gains more at every loading", "[cli]") {
  const std::filesystem::path dir = test_util::make_scratch_dir("cli_sweep");
  for (const auto& [name, gamma_s] :
       std::vector<std::pair<std::string, std::string>>{{"neutral", "0"},
                                                        {"averse", "0.3"}}) {
    std::ostringstream command;
    command << "sweep --scenarios " << shared_scenarios() << " --gamma-s "
            << gamma_s << " --eta-max 0.06 --coarse-step 0.01 --threads 2"
            << " --out-dir " << (dir / name);
    REQUIRE(run_cli(command.str()).exit_code == 0);
  }

  const auto neutral = read_csv(dir / "neutral" / "sweep_static_complete.csv");
  const auto averse = read_csv(dir / "averse" / "sweep_static_complete.csv");
  REQUIRE(neutral.size() == 8);
  REQUIRE(averse.size() == 8);
  REQUIRE(neutral[0] == std::vector<std::string>{"contract_kind", "eta",
                                                 "lambda_worst", "seller_gain",
                                                 "buyer_gain", "u_summary"});
  CHECK(neutral[1][1] == "0");

  bool any_strict = false;
  for (std::size_t row = 1; row < neutral.size(); ++row) {
    REQUIRE(neutral[row][1] == averse[row][1]);
    const double gain_neutral = std::stod(neutral[row][3]);
    const double gain_averse = std::stod(averse[row][3]);
    const double hedge = std::stod(neutral[row][5]);
    CHECK(gain_neutral >= gain_averse - 1e-12);
    if (hedge > 0.0 && gain_neutral > gain_averse + 1e-9) any_strict = true;
  }
  CHECK(any_strict);
}

TEST_CASE("sweep emits one file per contract kind and ambiguity level",
          "[cli]") {
  const std::filesystem::path dir = test_util::make_scratch_dir("cli_files");
  std::ostringstream command;
  command << "sweep --scenarios " << shared_scenarios()
          << " --alpha 0.1 --lambda-grid 11 --eta-max 0.03 --coarse-step 0.01"
          << " --threads 2 --out-dir " << dir;
  REQUIRE(run_cli(command.str()).exit_code == 0);

  for (const std::string name :
       {"sweep_static_complete.csv", "sweep_dynamic_complete.csv",
        "sweep_static_alpha0.1.csv", "sweep_dynamic_alpha0.1.csv"}) {
    INFO(name);
    CHECK(std::filesystem::exists(dir / name));
  }

  const nlohmann::json summary =
      nlohmann::json::parse(test_util::read_file(dir / "equilibrium.json"));
  REQUIRE(summary.is_array());
  REQUIRE(summary.size() == 4);
  CHECK(summary[0]["alpha"].is_null());
  CHECK(summary[2]["alpha"].get<double>() == 0.1);
  for (const auto& entry : summary) {
    for (const std::string key : {"kind", "alpha", "eta_star", "seller_gain",
                                  "buyer_gain", "lambda_worst", "no_trade"}) {
      INFO(key);
      CHECK(entry.contains(key));
    }
  }
}

// ============================================================================
// paths
// ============================================================================

TEST_CASE("path panels are well formed and reproducible", "[cli]") {
  const std::filesystem::path dir = test_util::make_scratch_dir("cli_paths");
  const std::string base_args = [&] {
    std::ostringstream args;
    args << "paths --scenarios " << shared_scenarios()
         << " --eta 0.05 --chains 4000 --seed 5 --svg";
    return args.str();
  }();

  std::ostringstream first;
  first << base_args << " --threads 1 --out-dir " << (dir / "one");
  REQUIRE(run_cli(first.str()).exit_code == 0);

  const auto fixed = read_csv(dir / "one" / "fixed_static.csv");
  REQUIRE(fixed.size() == 13);
  REQUIRE(fixed[0] == std::vector<std::string>{"t", "fixed_payment"});
  for (std::size_t row = 2; row < fixed.size(); ++row)
    CHECK(std::stod(fixed[row][1]) <= std::stod(fixed[row - 1][1]));

  const auto fan = read_csv(dir / "one" / "fixed_dynamic_fan.csv");
  REQUIRE(fan.size() == 13);
  REQUIRE(fan[0] == std::vector<std::string>{"t", "mean", "q2.5", "q97.5"});
  for (std::size_t row = 1; row < fan.size(); ++row) {
    const double mean = std::stod(fan[row][1]);
    CHECK(std::stod(fan[row][2]) <= mean);
    CHECK(mean <= std::stod(fan[row][3]));
  }

  const auto hedge = read_csv(dir / "one" / "hedge_dynamic.csv");
  REQUIRE(hedge.size() == 14);
  REQUIRE(hedge[0] == std::vector<std::string>{"t", "u", "f", "F"});

  const auto static_hedge = read_csv(dir / "one" / "hedge_static.csv");
  REQUIRE(static_hedge.size() == 13);
  for (std::size_t row = 2; row < static_hedge.size(); ++row)
    CHECK(static_hedge[row][1] == static_hedge[1][1]);

  for (const std::string name : {"fixed_legs.svg", "hedge_paths.svg"}) {
    INFO(name);
    const std::string svg = test_util::read_file(dir / "one" / name);
    CHECK(svg.rfind("<svg", 0) == 0);
  }

  // The worker thread count comes from the environment when no flag is
  // given, and must not change any output.
  std::ostringstream second;
  second << "LONGSWAP_THREADS=4 " << test_util::cli_path() << " " << base_args
         << " --out-dir " << (dir / "two");
  REQUIRE(test_util::run_command(second.str(), dir / "two.log") == 0);
  for (const std::string name :
       {"fixed_static.csv", "fixed_dynamic_fan.csv", "hedge_dynamic.csv",
        "hedge_static.csv"}) {
    INFO(name);
    CHECK(test_util::read_file(dir / "one" / name) ==
          test_util::read_file(dir / "two" / name));
  }
}

// ============================================================================
// ambiguity-table
// ============================================================================

TEST_CASE("the ambiguity table lists nested intervals around one", "[cli]") {
  const std::filesystem::path dir = test_util::make_scratch_dir("cli_table");
  std::ostringstream command;
  command << "ambiguity-table --scenarios " << shared_scenarios()
          << " --alpha 0.05 --alpha 0.1 --out " << (dir / "table.csv");
  REQUIRE(run_cli(command.str()).exit_code == 0);

  const auto table = read_csv(dir / "table.csv");
  REQUIRE(table.size() == 3);
  REQUIRE(table[0] ==
          std::vector<std::string>{"alpha", "lambda_lo", "lambda_hi"});
  CHECK(table[1][0] == "0.05");
  CHECK(table[2][0] == "0.1");
  const double lo_small = std::stod(table[1][1]);
  const double hi_small = std::stod(table[1][2]);
  const double lo_large = std::stod(table[2][1]);
  const double hi_large = std::stod(table[2][2]);
  CHECK(lo_small < 1.0);
  CHECK(hi_small > 1.0);
  CHECK(lo_large < lo_small);
  CHECK(hi_large > hi_small);
}

// ============================================================================
// equilibrium
// ============================================================================

TEST_CASE("the equilibrium command reports a complete summary", "[cli]") {
  const std::filesystem::path dir = test_util::make_scratch_dir("cli_eq");
  std::ostringstream command;
  command << "equilibrium --scenarios " << shared_scenarios()
          << " --kind dynamic --alpha 0.1 --lambda-grid 11"
          << " --eta-max 0.05 --coarse-step 0.01 --threads 2 --out "
          << (dir / "eq.json");
  REQUIRE(run_cli(command.str()).exit_code == 0);

  const nlohmann::json entry =
      nlohmann::json::parse(test_util::read_file(dir / "eq.json"));
  CHECK(entry["kind"].get<std::string>() == "dynamic");
  CHECK(entry["alpha"].get<double>() == 0.1);
  CHECK(entry["eta_star"].get<double>() >= 0.0);
  CHECK(entry["eta_star"].get<double>() <= 0.05);
  CHECK(entry["lambda_worst"].get<double>() > 0.0);
  CHECK(entry["no_trade"].is_boolean());
  CHECK(entry.contains("seller_gain"));
  CHECK(entry.contains("buyer_gain"));
}

// ============================================================================
// failure modes
// ============================================================================

TEST_CASE("a corrupt scenario file exits with the i/o code", "[cli]") {
  const std::filesystem::path dir = test_util::make_scratch_dir("cli_bad");
  const std::filesystem::path bad = dir / "bad.lswp";
  std::ofstream(bad) << "not a scenario file";
  std::ostringstream command;
  command << "paths --scenarios " << bad << " --out-dir " << dir;
  CHECK(run_cli(command.str()).exit_code == 3);
}

TEST_CASE("a malformed config file exits with the validation code", "[cli]") {
  const std::filesystem::path dir = test_util::make_scratch_dir("cli_cfg");
  const std::filesystem::path broken = dir / "broken.json";
  std::ofstream(broken) << "{ nope";
  std::ostringstream command;
  command << "sweep --scenarios " << shared_scenarios() << " --config "
          << broken << " --out-dir " << dir;
  CHECK(run_cli(command.str()).exit_code == 2);
}

TEST_CASE("an unknown config key exits with the validation code", "[cli]") {
  const std::filesystem::path dir = test_util::make_scratch_dir("cli_key");
  const std::filesystem::path config = dir / "config.json";
  std::ofstream(config) << "{\"bogus_key\": 1}";
  std::ostringstream command;
  command << "sweep --scenarios " << shared_scenarios() << " --config "
          << config << " --out-dir " << dir;
  CHECK(run_cli(command.str()).exit_code == 2);
}

TEST_CASE("an unreachable ambiguity level exits with the numerical code",
          "[cli]") {
  const std::filesystem::path dir = test_util::make_scratch_dir("cli_alpha");
  std::ostringstream command;
  command << "equilibrium --scenarios " << shared_scenarios()
          << " --kind static --alpha 0.9 --out-dir " << dir;
  CHECK(run_cli(command.str()).exit_code == 4);
}

TEST_CASE("a missing scenario file exits with the validation code", "[cli]") {
  CHECK(run_cli("sweep").exit_code == 2);
}
