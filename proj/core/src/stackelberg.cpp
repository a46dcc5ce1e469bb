#include "longswap/stackelberg.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "format_util.hpp"
#include "longswap/dynamic_solver.hpp"
#include "longswap/errors.hpp"
#include "longswap/parallel.hpp"
#include "longswap/static_solver.hpp"

namespace longswap {

namespace {

constexpr double kLambdaMax = 100.0;
constexpr double kExpectancyTol = 1e-8;

// Solves life_expectancy(curve, lambda) = target for lambda by bisection.
// The expectancy is continuous and strictly decreasing in lambda, so a
// bracket, once found, pins the root.
double solve_lambda(const SurvivalCurve& curve, double target) {
  double lo = 1.0;
  double hi = 1.0;
  double e_lo = life_expectancy(curve, lo);
  double e_hi = e_lo;
  if (e_lo > target) {
    // Root lies above one; grow the upper end until the target is crossed.
    while (e_hi > target) {
      hi *= 2.0;
      if (hi > kLambdaMax) {
        throw numerical_error(
            "ambiguity interval: expectancy target not reachable below "
            "lambda = 100");
      }
      e_hi = life_expectancy(curve, hi);
    }
  } else {
    // Root lies below one; shrink the lower end toward zero.
    while (e_lo < target) {
      lo *= 0.5;
      if (lo < 1e-12) {
        throw numerical_error(
            "ambiguity interval: expectancy target exceeds the horizon bound");
      }
      e_lo = life_expectancy(curve, lo);
    }
  }
  for (int iter = 0; iter < 10000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double e_mid = life_expectancy(curve, mid);
    if (std::abs(e_mid - target) <= kExpectancyTol) return mid;
    if (e_mid > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw numerical_error("ambiguity interval: bisection did not converge");
}

struct CellResult {
  double seller_gain = 0.0;
  double buyer_gain = 0.0;
  double u_summary = 0.0;
};

// Per-prior data reused across every loading: moments are independent of
// eta, so they are built once per lambda.
class GridEvaluator {
 public:
  GridEvaluator(const MarketContext& context, const AmbiguitySet& ambiguity)
      : context_(context), lambdas_(ambiguity.grid) {
    if (context.scenarios == nullptr) {
      throw validation_error("market context lacks a scenario set");
    }
    context_.contract.validate();
    cells_.resize(lambdas_.size());
    const int threads = resolve_thread_count(context.threads);
    parallel_for(lambdas_.size(), threads, [&](std::size_t i) {
      cells_[i] = cohort_covariance(context_.contract.cohort,
                                    *context_.scenarios,
                                    PriorMeasure{lambdas_[i]},
                                    context_.moments_mode);
    });
    if (context_.benchmark_response) {
      benchmark_moments_ =
          cohort_covariance(context_.contract.cohort, *context_.scenarios,
                            PriorMeasure{1.0}, context_.moments_mode);
    }
  }

  std::size_t size() const { return lambdas_.size(); }
  double lambda_at(std::size_t i) const { return lambdas_[i]; }

  CellResult evaluate(ContractKind kind, double eta, std::size_t i) const {
    ContractSpec contract = context_.contract;
    contract.kind = kind;
    contract.eta = eta;
    const PriorMeasure cell_prior{lambdas_[i]};
    const PriorMeasure response_prior =
        context_.benchmark_response ? PriorMeasure{1.0} : cell_prior;

    CellResult result;
    if (kind == ContractKind::static_swap) {
      const CohortMoments& response_moments =
          context_.benchmark_response ? benchmark_moments_ : cells_[i];
      StaticSolution solution =
          static_best_response(contract, response_moments, context_.curve,
                               context_.gamma_b, response_prior);
      const auto gains =
          static_welfare_gains(contract, solution, cells_[i], context_.curve,
                               context_.gamma_b, context_.gamma_s);
      result.buyer_gain = gains.first;
      result.seller_gain = gains.second;
      result.u_summary = solution.u_star;
      return result;
    }

    const DynamicSolution solution = dynamic_equilibrium(
        contract, context_.curve, context_.gamma_b, response_prior);
    double buyer_gain;
    if (context_.benchmark_response && lambdas_[i] != 1.0) {
      // The buyer committed to the benchmark response; report what that
      // policy is worth to them under the cell's prior.
      const DynamicSolution revalued = dynamic_fixed_policy_value(
          contract, context_.curve, context_.gamma_b, cell_prior,
          solution.hedge);
      const DynamicSolution baseline = dynamic_fixed_policy_value(
          contract, context_.curve, context_.gamma_b, cell_prior,
          std::vector<double>(solution.hedge.size(), 0.0));
      buyer_gain = revalued.buyer_value - baseline.buyer_value;
    } else {
      const DynamicSolution baseline = dynamic_fixed_policy_value(
          contract, context_.curve, context_.gamma_b, cell_prior,
          std::vector<double>(solution.hedge.size(), 0.0));
      buyer_gain = solution.buyer_value - baseline.buyer_value;
    }
    const double seller_value = dynamic_seller_value_analytic(
        solution, contract, cells_[i], context_.curve, context_.gamma_s);
    const double seller_baseline =
        contract.seller_initial *
        std::pow(1.0 + contract.rate, contract.horizon);
    result.buyer_gain = buyer_gain;
    result.seller_gain = seller_value - seller_baseline;
    double mean_u = 0.0;
    for (double u : solution.hedge) mean_u += u;
    result.u_summary =
        solution.hedge.empty() ? 0.0
                               : mean_u / static_cast<double>(solution.hedge.size());
    return result;
  }

  // Worst cell for the seller at the given loading; ties keep the lowest
  // lambda so the scan is order-independent.
  std::pair<CellResult, double> worst(ContractKind kind, double eta) const {
    CellResult best;
    double lambda = lambdas_.front();
    bool first = true;
    for (std::size_t i = 0; i < lambdas_.size(); ++i) {
      const CellResult cell = evaluate(kind, eta, i);
      if (first || cell.seller_gain < best.seller_gain) {
        best = cell;
        lambda = lambdas_[i];
        first = false;
      }
    }
    return {best, lambda};
  }

 private:
  MarketContext context_;
  std::vector<double> lambdas_;
  std::vector<CohortMoments> cells_;
  CohortMoments benchmark_moments_;
};

}  // namespace

double life_expectancy(const SurvivalCurve& curve, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw validation_error("life_expectancy: lambda must be positive");
  }
  double total = 0.0;
  for (int t = 1; t <= curve.horizon; ++t) {
    const double p = curve.multi_year[static_cast<std::size_t>(t)];
    total += lambda == 1.0 ? p : std::pow(p, lambda);
  }
  return total;
}

AmbiguitySet lambda_interval(const SurvivalCurve& curve, double alpha,
                             int grid_points) {
  if (!(alpha >= 0.0) || alpha >= 1.0) {
    throw validation_error("ambiguity level must lie in [0, 1)");
  }
  if (grid_points < 1) {
    throw validation_error("ambiguity grid needs at least one point");
  }
  if (curve.horizon < 1) {
    throw validation_error("ambiguity interval needs a non-empty curve");
  }
  AmbiguitySet set;
  set.alpha = alpha;
  set.reference_expectancy = life_expectancy(curve, 1.0);
  if (alpha == 0.0) {
    set.lambda_lo = 1.0;
    set.lambda_hi = 1.0;
    set.grid.assign(static_cast<std::size_t>(grid_points), 1.0);
    return set;
  }
  if (grid_points < 2) {
    throw validation_error(
        "a non-degenerate ambiguity interval needs at least two grid points");
  }
  set.lambda_hi =
      solve_lambda(curve, (1.0 - alpha) * set.reference_expectancy);
  set.lambda_lo =
      solve_lambda(curve, (1.0 + alpha) * set.reference_expectancy);
  set.grid.resize(static_cast<std::size_t>(grid_points));
  const double step = (set.lambda_hi - set.lambda_lo) /
                      static_cast<double>(grid_points - 1);
  for (int i = 0; i < grid_points; ++i) {
    set.grid[static_cast<std::size_t>(i)] =
        set.lambda_lo + step * static_cast<double>(i);
  }
  set.grid.back() = set.lambda_hi;
  return set;
}

double seller_objective(ContractKind kind, double eta, PriorMeasure prior,
                        const MarketContext& context) {
  prior.validate();
  AmbiguitySet single;
  single.alpha = 0.0;
  single.lambda_lo = prior.lambda;
  single.lambda_hi = prior.lambda;
  single.grid = {prior.lambda};
  const GridEvaluator evaluator(context, single);
  return evaluator.evaluate(kind, eta, 0).seller_gain;
}

std::pair<double, double> worst_case_objective(ContractKind kind, double eta,
                                               const AmbiguitySet& ambiguity,
                                               const MarketContext& context) {
  if (ambiguity.grid.empty()) {
    throw validation_error("ambiguity set has an empty grid");
  }
  const GridEvaluator evaluator(context, ambiguity);
  const auto [cell, lambda] = evaluator.worst(kind, eta);
  return {cell.seller_gain, lambda};
}

EquilibriumSolution optimize_eta(ContractKind kind,
                                 const AmbiguitySet& ambiguity,
                                 const MarketContext& context, double eta_max,
                                 double coarse_step, double refine_tol) {
  if (!(eta_max > 0.0) || !(coarse_step > 0.0) || !(refine_tol > 0.0)) {
    throw validation_error("optimize_eta: grid settings must be positive");
  }
  if (ambiguity.grid.empty()) {
    throw validation_error("ambiguity set has an empty grid");
  }
  const GridEvaluator evaluator(context, ambiguity);

  const auto grid_count =
      static_cast<std::size_t>(std::floor(eta_max / coarse_step + 0.5)) + 1;
  std::vector<SweepRow> rows(grid_count);
  const int threads = resolve_thread_count(context.threads);
  parallel_for(grid_count, threads, [&](std::size_t i) {
    const double eta = std::min(static_cast<double>(i) * coarse_step, eta_max);
    const auto [cell, lambda] = evaluator.worst(kind, eta);
    rows[i] = SweepRow{kind, eta, lambda, cell.seller_gain, cell.buyer_gain,
                       cell.u_summary};
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].seller_gain > rows[best].seller_gain) best = i;
  }

  // Golden-section refinement around the best coarse point. Every evaluation
  // is tracked so the final answer can never fall below the grid optimum.
  double best_eta = rows[best].eta;
  CellResult best_cell{rows[best].seller_gain, rows[best].buyer_gain,
                       rows[best].u_summary};
  double best_lambda = rows[best].lambda_worst;

  double a = std::max(0.0, best_eta - coarse_step);
  double b = std::min(eta_max, best_eta + coarse_step);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto probe = [&](double eta) {
    const auto [cell, lambda] = evaluator.worst(kind, eta);
    if (cell.seller_gain > best_cell.seller_gain) {
      best_cell = cell;
      best_eta = eta;
      best_lambda = lambda;
    }
    return cell.seller_gain;
  };
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = probe(c);
  double fd = probe(d);
  while (b - a > refine_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = probe(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = probe(d);
    }
  }

  EquilibriumSolution solution;
  solution.kind = kind;
  solution.eta_star = best_eta;
  solution.seller_gain = best_cell.seller_gain;
  solution.buyer_gain = best_cell.buyer_gain;
  solution.lambda_worst = best_lambda;
  solution.no_trade = !(best_cell.seller_gain > 0.0);
  solution.sweep = std::move(rows);
  return solution;
}

std::vector<std::pair<double, double>> buyer_welfare_profile(
    ContractKind kind, double eta, const AmbiguitySet& ambiguity,
    const MarketContext& context) {
  if (ambiguity.grid.empty()) {
    throw validation_error("ambiguity set has an empty grid");
  }
  const GridEvaluator evaluator(context, ambiguity);
  std::vector<std::pair<double, double>> profile;
  profile.reserve(evaluator.size());
  for (std::size_t i = 0; i < evaluator.size(); ++i) {
    profile.emplace_back(evaluator.lambda_at(i),
                         evaluator.evaluate(kind, eta, i).buyer_gain);
  }
  return profile;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "contract_kind,eta,lambda_worst,seller_gain,buyer_gain,u_summary\n";
  for (const auto& row : rows) {
    out << to_string(row.kind) << ',' << detail::csv_number(row.eta) << ','
        << detail::csv_number(row.lambda_worst) << ','
        << detail::csv_number(row.seller_gain) << ','
        << detail::csv_number(row.buyer_gain) << ','
        << detail::csv_number(row.u_summary) << '\n';
  }
}

}  // namespace longswap
