#include "longswap/contract.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "format_util.hpp"
#include "longswap/errors.hpp"

namespace longswap {

namespace {

void require_curve(const ContractSpec& contract, const SurvivalCurve& curve) {
  if (curve.horizon < contract.horizon) {
    throw validation_error("survival curve is shorter than the contract");
  }
  if (curve.initial_age != contract.cohort.initial_age) {
    throw validation_error("survival curve age does not match the contract");
  }
}

void require_hedge(const ContractSpec& contract,
                   const std::vector<double>& hedge) {
  if (hedge.size() != static_cast<std::size_t>(contract.horizon)) {
    throw validation_error("hedge path must have one entry per contract year");
  }
  for (double u : hedge) {
    if (!(u >= 0.0 && u <= 1.0)) {
      throw validation_error("hedge ratios must lie in [0, 1]");
    }
  }
}

// Discount-accumulation factors R^(T-t) for t = 0..T.
std::vector<double> accumulation(const ContractSpec& contract) {
  const int T = contract.horizon;
  std::vector<double> acc(static_cast<std::size_t>(T) + 1);
  acc[static_cast<std::size_t>(T)] = 1.0;
  for (int t = T - 1; t >= 0; --t) {
    acc[static_cast<std::size_t>(t)] =
        acc[static_cast<std::size_t>(t + 1)] * (1.0 + contract.rate);
  }
  return acc;
}

double quantile_sorted(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) return 0.0;
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

const char* to_string(ContractKind kind) {
  return kind == ContractKind::static_swap ? "static" : "dynamic";
}

void ContractSpec::validate() const {
  cohort.validate();
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw validation_error("contract: risk loading must be non-negative");
  }
  if (!(rate > -1.0) || !std::isfinite(rate)) {
    throw validation_error("contract: interest rate must exceed -1");
  }
  if (horizon != cohort.horizon) {
    throw validation_error("contract: horizon must match the cohort horizon");
  }
  if (!std::isfinite(buyer_initial) || !std::isfinite(seller_initial)) {
    throw validation_error("contract: initial surpluses must be finite");
  }
}

std::vector<double> fixed_payments_static(const ContractSpec& contract,
                                          const SurvivalCurve& curve) {
  contract.validate();
  require_curve(contract, curve);
  if (contract.kind != ContractKind::static_swap) {
    throw validation_error("fixed_payments_static needs a static contract");
  }
  const int T = contract.horizon;
  std::vector<double> payments(static_cast<std::size_t>(T) + 1, 0.0);
  for (int t = 1; t <= T; ++t) {
    payments[static_cast<std::size_t>(t)] =
        static_cast<double>(contract.cohort.initial_count) *
        curve.multi_year[static_cast<std::size_t>(t)];
  }
  return payments;
}

double fixed_payment_dynamic(const ContractSpec& contract,
                             const SurvivalCurve& curve, int t,
                             double lives_prev) {
  contract.validate();
  require_curve(contract, curve);
  if (contract.kind != ContractKind::dynamic_swap) {
    throw validation_error("fixed_payment_dynamic needs a dynamic contract");
  }
  if (t < 1 || t > contract.horizon) {
    throw validation_error("fixed_payment_dynamic: year out of range");
  }
  if (lives_prev < 0.0) {
    throw validation_error("fixed_payment_dynamic: negative lives");
  }
  return curve.one_year[static_cast<std::size_t>(t)] * lives_prev;
}

SurplusSample terminal_surpluses(const ContractSpec& contract,
                                 const std::vector<double>& hedge,
                                 const std::vector<std::int64_t>& lives,
                                 const SurvivalCurve& curve) {
  contract.validate();
  require_curve(contract, curve);
  require_hedge(contract, hedge);
  const int T = contract.horizon;
  if (lives.size() != static_cast<std::size_t>(T) + 1) {
    throw validation_error("lives path must cover years 0 through T");
  }
  if (lives[0] != contract.cohort.initial_count) {
    throw validation_error("lives path must start at the cohort count");
  }
  for (int t = 1; t <= T; ++t) {
    const std::int64_t cur = lives[static_cast<std::size_t>(t)];
    if (cur < 0 || cur > lives[static_cast<std::size_t>(t - 1)]) {
      throw validation_error("lives path must be non-negative and non-increasing");
    }
  }

  const std::vector<double> schedule =
      contract.kind == ContractKind::static_swap
          ? fixed_payments_static(contract, curve)
          : std::vector<double>();

  double buyer = contract.buyer_initial;
  double seller = contract.seller_initial;
  const double growth = 1.0 + contract.rate;
  for (int t = 1; t <= T; ++t) {
    const double l = static_cast<double>(lives[static_cast<std::size_t>(t)]);
    const double fixed_leg =
        contract.kind == ContractKind::static_swap
            ? schedule[static_cast<std::size_t>(t)]
            : fixed_payment_dynamic(
                  contract, curve, t,
                  static_cast<double>(lives[static_cast<std::size_t>(t - 1)]));
    const double u = hedge[static_cast<std::size_t>(t - 1)];
    const double swap_flow = u * (l - (1.0 + contract.eta) * fixed_leg);
    buyer = buyer * growth - l + swap_flow;
    seller = seller * growth - swap_flow;
  }

  SurplusSample sample;
  sample.buyer_terminal = buyer;
  sample.seller_terminal = seller;
  sample.hedge_path = hedge;
  sample.lives_path = lives;
  return sample;
}

AffineTerminal buyer_terminal_affine(const ContractSpec& contract,
                                     const std::vector<double>& hedge,
                                     const SurvivalCurve& curve) {
  contract.validate();
  require_curve(contract, curve);
  require_hedge(contract, hedge);
  const int T = contract.horizon;
  const auto acc = accumulation(contract);

  AffineTerminal out;
  out.weights.assign(static_cast<std::size_t>(T) + 1, 0.0);
  out.constant = contract.buyer_initial * acc[0];

  if (contract.kind == ContractKind::static_swap) {
    const auto schedule = fixed_payments_static(contract, curve);
    for (int t = 1; t <= T; ++t) {
      const double u = hedge[static_cast<std::size_t>(t - 1)];
      out.weights[static_cast<std::size_t>(t)] =
          (u - 1.0) * acc[static_cast<std::size_t>(t)];
      out.constant -= u * (1.0 + contract.eta) *
                      schedule[static_cast<std::size_t>(t)] *
                      acc[static_cast<std::size_t>(t)];
    }
    return out;
  }

  // Dynamic legs reset from realized lives, so the year-t fixed payment
  // contributes a weight on l_{t-1} instead of a constant.
  for (int t = 1; t <= T; ++t) {
    const double u = hedge[static_cast<std::size_t>(t - 1)];
    const double p = curve.one_year[static_cast<std::size_t>(t)];
    out.weights[static_cast<std::size_t>(t)] +=
        (u - 1.0) * acc[static_cast<std::size_t>(t)];
    out.weights[static_cast<std::size_t>(t - 1)] -=
        u * (1.0 + contract.eta) * p * acc[static_cast<std::size_t>(t)];
  }
  return out;
}

AffineTerminal seller_terminal_affine(const ContractSpec& contract,
                                      const std::vector<double>& hedge,
                                      const SurvivalCurve& curve) {
  contract.validate();
  require_curve(contract, curve);
  require_hedge(contract, hedge);
  const int T = contract.horizon;
  const auto acc = accumulation(contract);

  AffineTerminal out;
  out.weights.assign(static_cast<std::size_t>(T) + 1, 0.0);
  out.constant = contract.seller_initial * acc[0];

  if (contract.kind == ContractKind::static_swap) {
    const auto schedule = fixed_payments_static(contract, curve);
    for (int t = 1; t <= T; ++t) {
      const double u = hedge[static_cast<std::size_t>(t - 1)];
      out.weights[static_cast<std::size_t>(t)] =
          -u * acc[static_cast<std::size_t>(t)];
      out.constant += u * (1.0 + contract.eta) *
                      schedule[static_cast<std::size_t>(t)] *
                      acc[static_cast<std::size_t>(t)];
    }
    return out;
  }

  for (int t = 1; t <= T; ++t) {
    const double u = hedge[static_cast<std::size_t>(t - 1)];
    const double p = curve.one_year[static_cast<std::size_t>(t)];
    out.weights[static_cast<std::size_t>(t)] -=
        u * acc[static_cast<std::size_t>(t)];
    out.weights[static_cast<std::size_t>(t - 1)] +=
        u * (1.0 + contract.eta) * p * acc[static_cast<std::size_t>(t)];
  }
  return out;
}

double mean_variance_value(const AffineTerminal& terminal,
                           const CohortMoments& moments, double gamma) {
  const int T = moments.horizon;
  if (terminal.weights.size() != static_cast<std::size_t>(T) + 1) {
    throw validation_error("affine terminal does not match the moment horizon");
  }
  double mean = terminal.constant;
  for (int t = 0; t <= T; ++t) {
    mean += terminal.weights[static_cast<std::size_t>(t)] *
            moments.mean[static_cast<std::size_t>(t)];
  }
  double variance = 0.0;
  for (int i = 1; i <= T; ++i) {
    const double wi = terminal.weights[static_cast<std::size_t>(i)];
    if (wi == 0.0) continue;
    for (int j = 1; j <= T; ++j) {
      variance += wi * terminal.weights[static_cast<std::size_t>(j)] *
                  moments.cov_at(i, j);
    }
  }
  return mean - 0.5 * gamma * variance;
}

void write_fixed_leg_csv(std::ostream& out, const ContractSpec& contract,
                         const SurvivalCurve& curve) {
  const auto schedule = fixed_payments_static(contract, curve);
  out << "t,fixed_payment\n";
  for (int t = 1; t <= contract.horizon; ++t) {
    out << t << ',' << detail::csv_number(schedule[static_cast<std::size_t>(t)])
        << '\n';
  }
}

void write_fixed_leg_fan_csv(std::ostream& out, const ContractSpec& contract,
                             const SurvivalCurve& curve,
                             const CohortPathSample& sample) {
  contract.validate();
  require_curve(contract, curve);
  if (sample.horizon != contract.horizon || sample.chain_count == 0) {
    throw validation_error("path sample does not match the contract horizon");
  }
  out << "t,mean,q2.5,q97.5\n";
  std::vector<double> column(sample.chain_count);
  for (int t = 1; t <= contract.horizon; ++t) {
    double mean = 0.0;
    for (std::size_t n = 0; n < sample.chain_count; ++n) {
      const double leg = fixed_payment_dynamic(
          contract, curve, t, static_cast<double>(sample.at(n, t - 1)));
      column[n] = leg;
      mean += leg;
    }
    mean /= static_cast<double>(sample.chain_count);
    std::sort(column.begin(), column.end());
    out << t << ',' << detail::csv_number(mean) << ','
        << detail::csv_number(quantile_sorted(column, 0.025)) << ','
        << detail::csv_number(quantile_sorted(column, 0.975)) << '\n';
  }
}

}  // namespace longswap
