// Command line front end: scenario generation, loading sweeps, figure data
// and ambiguity tables on top of the longswap library.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "longswap/cohort.hpp"
#include "longswap/contract.hpp"
#include "longswap/dynamic_solver.hpp"
#include "longswap/errors.hpp"
#include "longswap/mortality.hpp"
#include "longswap/parallel.hpp"
#include "longswap/stackelberg.hpp"
#include "longswap/static_solver.hpp"

namespace {

using nlohmann::json;

struct RunConfig {
  std::string params_file;
  std::string scenarios_file;
  std::string out_dir = ".";
  int age = 65;
  int horizon = 35;
  std::int64_t initial_count = 10000;
  double rate = 0.02;
  double buyer_initial = 0.0;
  double seller_initial = 0.0;
  double gamma_b = 0.3;
  double gamma_s = 0.1;
  std::vector<double> alphas;
  double eta = 0.05;
  double eta_max = 1.0;
  double coarse_step = 0.005;
  double refine_tol = 1e-4;
  int lambda_grid = 101;
  std::string moments_mode = "aggregate";
  bool benchmark_response = false;
  std::size_t chains = 100000;
  std::size_t sim_paths = 2000;
  std::uint64_t seed = 1;
  int threads = 0;
  bool svg = false;
};

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw longswap::io_error("cannot open config file: " + path);
  json doc = json::parse(in);
  if (!doc.is_object())
    throw longswap::validation_error("config root must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "params") config.params_file = value.get<std::string>();
    else if (key == "scenarios") config.scenarios_file = value.get<std::string>();
    else if (key == "out_dir") config.out_dir = value.get<std::string>();
    else if (key == "age") config.age = value.get<int>();
    else if (key == "horizon") config.horizon = value.get<int>();
    else if (key == "initial_count") config.initial_count = value.get<std::int64_t>();
    else if (key == "rate") config.rate = value.get<double>();
    else if (key == "buyer_initial") config.buyer_initial = value.get<double>();
    else if (key == "seller_initial") config.seller_initial = value.get<double>();
    else if (key == "gamma_b") config.gamma_b = value.get<double>();
    else if (key == "gamma_s") config.gamma_s = value.get<double>();
    else if (key == "alphas") config.alphas = value.get<std::vector<double>>();
    else if (key == "eta") config.eta = value.get<double>();
    else if (key == "eta_max") config.eta_max = value.get<double>();
    else if (key == "coarse_step") config.coarse_step = value.get<double>();
    else if (key == "refine_tol") config.refine_tol = value.get<double>();
    else if (key == "lambda_grid") config.lambda_grid = value.get<int>();
    else if (key == "moments_mode") config.moments_mode = value.get<std::string>();
    else if (key == "benchmark_response") config.benchmark_response = value.get<bool>();
    else if (key == "chains") config.chains = value.get<std::size_t>();
    else if (key == "sim_paths") config.sim_paths = value.get<std::size_t>();
    else if (key == "seed") config.seed = value.get<std::uint64_t>();
    else if (key == "threads") config.threads = value.get<int>();
    else if (key == "svg") config.svg = value.get<bool>();
    else throw longswap::validation_error("unknown config key: " + key);
  }
}

longswap::MomentMode parse_moments_mode(const std::string& name) {
  if (name == "mixture") return longswap::MomentMode::mixture;
  if (name == "point_estimate") return longswap::MomentMode::point_estimate;
  if (name == "aggregate") return longswap::MomentMode::aggregate;
  throw longswap::validation_error("unknown moments mode: " + name);
}

int env_threads_fallback(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("LONGSWAP_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed > 0)
      return static_cast<int>(parsed);
  }
  return flag_value;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw longswap::io_error("cannot write file: " + path.string());
  return out;
}

std::string format_number(double value) {
  std::ostringstream out;
  out.precision(12);
  out << value;
  return out.str();
}

// ----------------------------------------------------------------------------
// Minimal SVG polyline plot: one fixed-size chart, one polyline per series.

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

void write_svg_chart(const std::filesystem::path& path,
                     const std::string& title,
                     const std::vector<Series>& series) {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.points) {
      if (first) {
        x_min = x_max = x;
        y_min = y_max = y;
        first = false;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;

  const double width = 640.0, height = 400.0, margin = 48.0;
  auto sx = [&](double x) {
    return margin + (x - x_min) / (x_max - x_min) * (width - 2.0 * margin);
  };
  auto sy = [&](double y) {
    return height - margin -
           (y - y_min) / (y_max - y_min) * (height - 2.0 * margin);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b"};

  std::ofstream out = open_output(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"400\" viewBox=\"0 0 640 400\">\n";
  out << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  out << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
      << width - margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
      << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  if (y_min < 0.0 && y_max > 0.0) {
    out << "<line x1=\"" << margin << "\" y1=\"" << sy(0.0) << "\" x2=\""
        << width - margin << "\" y2=\"" << sy(0.0)
        << "\" stroke=\"#cccccc\" stroke-dasharray=\"4 4\"/>\n";
  }
  int index = 0;
  for (const Series& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[index % 6]
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.points) out << sx(x) << ',' << sy(y) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << width - margin + 4 << "\" y=\""
        << margin + 16.0 * index << "\" font-family=\"sans-serif\" "
        << "font-size=\"11\" fill=\"" << colors[index % 6] << "\">" << s.name
        << "</text>\n";
    ++index;
  }
  out << "</svg>\n";
}

// ----------------------------------------------------------------------------
// Shared loading helpers

longswap::MortalityScenarioSet load_scenario_file(const RunConfig& config) {
  if (config.scenarios_file.empty())
    throw longswap::validation_error("no scenario file given (--scenarios)");
  return longswap::load_scenarios(config.scenarios_file);
}

longswap::ContractSpec contract_from(const RunConfig& config,
                                     const longswap::MortalityScenarioSet& set,
                                     longswap::ContractKind kind, double eta) {
  longswap::ContractSpec contract;
  contract.kind = kind;
  contract.eta = eta;
  contract.rate = config.rate;
  contract.horizon = set.horizon;
  contract.cohort =
      longswap::CohortSpec{set.initial_age, config.initial_count, set.horizon};
  contract.buyer_initial = config.buyer_initial;
  contract.seller_initial = config.seller_initial;
  return contract;
}

longswap::MarketContext context_from(const RunConfig& config,
                                     const longswap::MortalityScenarioSet& set,
                                     const longswap::SurvivalCurve& curve) {
  longswap::MarketContext context;
  context.contract =
      contract_from(config, set, longswap::ContractKind::static_swap, 0.0);
  context.scenarios = &set;
  context.curve = curve;
  context.gamma_b = config.gamma_b;
  context.gamma_s = config.gamma_s;
  context.moments_mode = parse_moments_mode(config.moments_mode);
  context.benchmark_response = config.benchmark_response;
  context.threads = config.threads;
  return context;
}

longswap::AmbiguitySet ambiguity_from(const longswap::SurvivalCurve& curve,
                                      std::optional<double> alpha,
                                      int lambda_grid) {
  if (!alpha.has_value()) return longswap::lambda_interval(curve, 0.0, 1);
  return longswap::lambda_interval(curve, *alpha, lambda_grid);
}

std::string alpha_label(std::optional<double> alpha) {
  if (!alpha.has_value()) return "complete";
  std::ostringstream out;
  out << "alpha" << *alpha;
  return out.str();
}

json equilibrium_to_json(const longswap::EquilibriumSolution& solution,
                         std::optional<double> alpha) {
  json entry;
  entry["kind"] = longswap::to_string(solution.kind);
  if (alpha.has_value())
    entry["alpha"] = *alpha;
  else
    entry["alpha"] = nullptr;
  entry["eta_star"] = solution.eta_star;
  entry["seller_gain"] = solution.seller_gain;
  entry["buyer_gain"] = solution.buyer_gain;
  entry["lambda_worst"] = solution.lambda_worst;
  entry["no_trade"] = solution.no_trade;
  return entry;
}

// ----------------------------------------------------------------------------
// Subcommands

int cmd_simulate(const RunConfig& config, const std::string& out_file) {
  if (config.params_file.empty())
    throw longswap::validation_error("simulate needs --params");
  const longswap::ApciParameters params =
      longswap::load_apci_parameters(config.params_file);
  const longswap::MortalityScenarioSet set = longswap::simulate_scenarios(
      params, config.age, config.horizon,
      static_cast<std::size_t>(config.sim_paths), config.seed,
      config.threads);
  longswap::save_scenarios(set, out_file);

  const longswap::SurvivalCurve curve = longswap::estimate_curve(set);
  std::cout << "wrote " << out_file << " (" << set.path_count << " paths, "
            << set.horizon << " years, age " << set.initial_age << ")\n";
  std::cout << "life expectancy e(" << set.initial_age << ") = "
            << format_number(longswap::life_expectancy(curve, 1.0)) << "\n";
  for (int t : {1, 5, 10, 20, set.horizon}) {
    if (t > set.horizon) continue;
    std::cout << "survival to year " << t << " = "
              << format_number(curve.multi_year[static_cast<std::size_t>(t)])
              << "\n";
  }
  return 0;
}

int cmd_sweep(const RunConfig& config) {
  const longswap::MortalityScenarioSet set = load_scenario_file(config);
  const longswap::SurvivalCurve curve = longswap::estimate_curve(set);
  const longswap::MarketContext context = context_from(config, set, curve);

  std::vector<std::optional<double>> levels = {std::nullopt};
  for (double alpha : config.alphas) levels.emplace_back(alpha);

  std::filesystem::create_directories(config.out_dir);
  json summary = json::array();
  for (const auto& alpha : levels) {
    const longswap::AmbiguitySet ambiguity =
        ambiguity_from(curve, alpha, config.lambda_grid);
    for (longswap::ContractKind kind :
         {longswap::ContractKind::static_swap,
          longswap::ContractKind::dynamic_swap}) {
      const longswap::EquilibriumSolution solution =
          longswap::optimize_eta(kind, ambiguity, context, config.eta_max,
                                 config.coarse_step, config.refine_tol);
      const std::string name = std::string("sweep_") +
                               longswap::to_string(kind) + "_" +
                               alpha_label(alpha) + ".csv";
      const std::filesystem::path csv_path =
          std::filesystem::path(config.out_dir) / name;
      std::ofstream out = open_output(csv_path);
      longswap::write_sweep_csv(out, solution.sweep);
      std::cout << "wrote " << csv_path.string() << "\n";
      summary.push_back(equilibrium_to_json(solution, alpha));

      if (config.svg) {
        Series gain;
        gain.name = "seller gain";
        for (const auto& row : solution.sweep)
          gain.points.emplace_back(row.eta, row.seller_gain);
        const std::string svg_name = std::string("sweep_") +
                                     longswap::to_string(kind) + "_" +
                                     alpha_label(alpha) + ".svg";
        write_svg_chart(std::filesystem::path(config.out_dir) / svg_name,
                        name, {gain});
      }
    }
  }
  const std::filesystem::path summary_path =
      std::filesystem::path(config.out_dir) / "equilibrium.json";
  std::ofstream out = open_output(summary_path);
  out << summary.dump(2) << "\n";
  std::cout << "wrote " << summary_path.string() << "\n";
  return 0;
}

int cmd_paths(const RunConfig& config) {
  const longswap::MortalityScenarioSet set = load_scenario_file(config);
  const longswap::SurvivalCurve curve = longswap::estimate_curve(set);
  std::filesystem::create_directories(config.out_dir);
  const longswap::PriorMeasure prior{1.0};

  const longswap::ContractSpec static_contract = contract_from(
      config, set, longswap::ContractKind::static_swap, config.eta);
  const std::filesystem::path static_csv =
      std::filesystem::path(config.out_dir) / "fixed_static.csv";
  {
    std::ofstream out = open_output(static_csv);
    longswap::write_fixed_leg_csv(out, static_contract, curve);
  }
  std::cout << "wrote " << static_csv.string() << "\n";

  const longswap::ContractSpec dynamic_contract = contract_from(
      config, set, longswap::ContractKind::dynamic_swap, config.eta);
  const longswap::CohortPathSample sample = longswap::sample_cohort_paths(
      dynamic_contract.cohort, set, prior, config.chains, config.seed,
      config.threads);
  const std::filesystem::path fan_csv =
      std::filesystem::path(config.out_dir) / "fixed_dynamic_fan.csv";
  {
    std::ofstream out = open_output(fan_csv);
    longswap::write_fixed_leg_fan_csv(out, dynamic_contract, curve, sample);
  }
  std::cout << "wrote " << fan_csv.string() << "\n";

  const longswap::DynamicSolution dynamic_solution =
      longswap::dynamic_equilibrium(dynamic_contract, curve, config.gamma_b,
                                    prior);
  const std::filesystem::path hedge_csv =
      std::filesystem::path(config.out_dir) / "hedge_dynamic.csv";
  {
    std::ofstream out = open_output(hedge_csv);
    longswap::write_hedge_path_csv(out, dynamic_solution);
  }
  std::cout << "wrote " << hedge_csv.string() << "\n";

  const longswap::CohortMoments moments = longswap::cohort_covariance(
      static_contract.cohort, set, prior,
      parse_moments_mode(config.moments_mode));
  const longswap::StaticSolution static_solution =
      longswap::static_best_response(static_contract, moments, curve,
                                     config.gamma_b, prior);
  const std::filesystem::path static_hedge_csv =
      std::filesystem::path(config.out_dir) / "hedge_static.csv";
  {
    std::ofstream out = open_output(static_hedge_csv);
    out << "t,u\n";
    for (int t = 0; t < static_contract.horizon; ++t)
      out << t << ',' << format_number(static_solution.u_star) << '\n';
  }
  std::cout << "wrote " << static_hedge_csv.string() << "\n";

  if (config.svg) {
    Series fixed_static;
    fixed_static.name = "static fixed leg";
    const std::vector<double> schedule =
        longswap::fixed_payments_static(static_contract, curve);
    for (int t = 1; t <= static_contract.horizon; ++t)
      fixed_static.points.emplace_back(
          t, schedule[static_cast<std::size_t>(t)]);
    write_svg_chart(std::filesystem::path(config.out_dir) / "fixed_legs.svg",
                    "fixed payment schedules", {fixed_static});

    Series hedge;
    hedge.name = "dynamic hedge";
    for (std::size_t t = 0; t < dynamic_solution.hedge.size(); ++t)
      hedge.points.emplace_back(static_cast<double>(t),
                                dynamic_solution.hedge[t]);
    write_svg_chart(std::filesystem::path(config.out_dir) / "hedge_paths.svg",
                    "hedge ratio paths", {hedge});
  }
  return 0;
}

int cmd_ambiguity_table(const RunConfig& config, const std::string& out_file) {
  const longswap::MortalityScenarioSet set = load_scenario_file(config);
  const longswap::SurvivalCurve curve = longswap::estimate_curve(set);
  std::vector<double> alphas = config.alphas;
  if (alphas.empty()) alphas = {0.05, 0.1, 0.15, 0.2, 0.4};

  std::ostringstream table;
  table << "alpha,lambda_lo,lambda_hi\n";
  for (double alpha : alphas) {
    const longswap::AmbiguitySet interval =
        longswap::lambda_interval(curve, alpha, config.lambda_grid);
    table << format_number(alpha) << ',' << format_number(interval.lambda_lo)
          << ',' << format_number(interval.lambda_hi) << '\n';
  }
  if (out_file.empty()) {
    std::cout << table.str();
  } else {
    std::ofstream out = open_output(out_file);
    out << table.str();
    std::cout << "wrote " << out_file << "\n";
  }
  return 0;
}

int cmd_equilibrium(const RunConfig& config, const std::string& kind_name,
                    std::optional<double> alpha, const std::string& out_file) {
  const longswap::MortalityScenarioSet set = load_scenario_file(config);
  const longswap::SurvivalCurve curve = longswap::estimate_curve(set);
  const longswap::MarketContext context = context_from(config, set, curve);

  longswap::ContractKind kind;
  if (kind_name == "static") {
    kind = longswap::ContractKind::static_swap;
  } else if (kind_name == "dynamic") {
    kind = longswap::ContractKind::dynamic_swap;
  } else {
    throw longswap::validation_error("unknown contract kind: " + kind_name);
  }

  const longswap::AmbiguitySet ambiguity =
      ambiguity_from(curve, alpha, config.lambda_grid);
  const longswap::EquilibriumSolution solution =
      longswap::optimize_eta(kind, ambiguity, context, config.eta_max,
                             config.coarse_step, config.refine_tol);
  const json entry = equilibrium_to_json(solution, alpha);
  std::cout << entry.dump(2) << "\n";
  if (!out_file.empty()) {
    std::ofstream out = open_output(out_file);
    out << entry.dump(2) << "\n";
    std::cout << "wrote " << out_file << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stackelberg longevity swap laboratory"};
  app.require_subcommand(1);

  RunConfig config;
  std::string config_file;
  std::string out_file;
  std::string kind_name = "static";
  double alpha_flag = -1.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_file, "JSON config file");
    cmd->add_option("--threads", config.threads,
                    "worker threads (0 = all cores)");
    cmd->add_option("--scenarios", config.scenarios_file,
                    "scenario file (.lswp)");
    cmd->add_option("--out-dir", config.out_dir, "output directory");
    cmd->add_option("--seed", config.seed, "random seed");
    cmd->add_option("--gamma-b", config.gamma_b, "buyer risk aversion");
    cmd->add_option("--gamma-s", config.gamma_s, "seller risk aversion");
    cmd->add_option("--initial-count", config.initial_count,
                    "initial annuitant count");
    cmd->add_option("--rate", config.rate, "interest rate");
    cmd->add_option("--eta-max", config.eta_max, "loading sweep upper bound");
    cmd->add_option("--coarse-step", config.coarse_step,
                    "loading sweep step");
    cmd->add_option("--refine-tol", config.refine_tol,
                    "loading refinement tolerance");
    cmd->add_option("--lambda-grid", config.lambda_grid,
                    "ambiguity grid points");
    cmd->add_option("--moments-mode", config.moments_mode,
                    "mixture | point_estimate | aggregate");
    cmd->add_flag("--benchmark-response", config.benchmark_response,
                  "buyer responds under the benchmark prior");
    cmd->add_flag("--svg", config.svg, "emit SVG charts next to the CSVs");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "simulate scenarios");
  add_common(simulate);
  simulate->add_option("--params", config.params_file,
                       "mortality parameter JSON");
  simulate->add_option("--paths", config.sim_paths, "number of paths");
  simulate->add_option("--age", config.age, "initial age");
  simulate->add_option("--horizon", config.horizon, "projection years");
  simulate->add_option("--out", out_file, "output scenario file");

  CLI::App* sweep = app.add_subcommand("sweep", "loading sweeps");
  add_common(sweep);
  sweep->add_option("--alpha", config.alphas,
                    "ambiguity levels (complete information always included)");

  CLI::App* paths = app.add_subcommand("paths", "fixed legs and hedge paths");
  add_common(paths);
  paths->add_option("--eta", config.eta, "loading for the path panels");
  paths->add_option("--chains", config.chains,
                    "Monte Carlo chains for the payment fan");

  CLI::App* table =
      app.add_subcommand("ambiguity-table", "lambda interval table");
  add_common(table);
  table->add_option("--alpha", config.alphas, "ambiguity levels");
  table->add_option("--out", out_file, "output CSV (stdout when omitted)");

  CLI::App* equilibrium =
      app.add_subcommand("equilibrium", "single equilibrium solve");
  add_common(equilibrium);
  equilibrium->add_option("--kind", kind_name, "static | dynamic");
  equilibrium->add_option("--alpha", alpha_flag,
                          "ambiguity level (omit for complete information)");
  equilibrium->add_option("--out", out_file, "output JSON file");

  try {
    // Config file values load first so that parsed flags override them.
    for (int i = 1; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc) {
        apply_config_file(config, argv[i + 1]);
        break;
      }
      if (arg.rfind("--config=", 0) == 0) {
        apply_config_file(config, arg.substr(9));
        break;
      }
    }
    app.parse(argc, argv);
    config.threads = env_threads_fallback(config.threads);

    if (simulate->parsed()) {
      if (out_file.empty()) out_file = "scenarios.lswp";
      return cmd_simulate(config, out_file);
    }
    if (sweep->parsed()) return cmd_sweep(config);
    if (paths->parsed()) return cmd_paths(config);
    if (table->parsed()) return cmd_ambiguity_table(config, out_file);
    if (equilibrium->parsed()) {
      std::optional<double> alpha;
      if (equilibrium->get_option("--alpha")->count() > 0) alpha = alpha_flag;
      return cmd_equilibrium(config, kind_name, alpha, out_file);
    }
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const longswap::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const longswap::io_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const longswap::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
