#include "longswap/rng.hpp"

#include <cmath>
#include <limits>

#include "longswap/errors.hpp"

namespace longswap {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c,
                         const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// Two 32-bit lanes to a double in the open interval (0, 1). The top 53 bits
// form the mantissa and a half-ulp offset keeps zero out of the range.
inline double lanes_to_unit_double(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(hi) << 32) | static_cast<std::uint64_t>(lo);
  return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  philox_round(counter, key);
  for (int round = 1; round < 10; ++round) {
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
    philox_round(counter, key);
  }
  return counter;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint32_t stream,
                       std::uint64_t path)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream),
      path_(path) {
  if (path > std::numeric_limits<std::uint32_t>::max()) {
    throw validation_error("rng path index exceeds 32 bits");
  }
}

double CounterRng::uniform_at(std::uint64_t index) const {
  const std::array<std::uint32_t, 4> counter = {
      stream_, static_cast<std::uint32_t>(path_),
      static_cast<std::uint32_t>(index),
      static_cast<std::uint32_t>(index >> 32)};
  const auto block = philox4x32(counter, key_);
  return lanes_to_unit_double(block[0], block[1]);
}

double CounterRng::normal_at(std::uint64_t index) const {
  const std::array<std::uint32_t, 4> counter = {
      stream_, static_cast<std::uint32_t>(path_),
      static_cast<std::uint32_t>(index),
      static_cast<std::uint32_t>(index >> 32)};
  const auto block = philox4x32(counter, key_);
  const double u1 = lanes_to_unit_double(block[0], block[1]);
  const double u2 = lanes_to_unit_double(block[2], block[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::int64_t binomial_from_uniform(double u, std::int64_t n, double p) {
  if (n < 0) throw validation_error("binomial trial count is negative");
  if (!(u > 0.0 && u < 1.0)) {
    throw validation_error("binomial inversion needs a uniform in (0,1)");
  }
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;

  // Start at the mode and accumulate mass alternating outward; the running
  // masses on each side follow from the one-step pmf ratio, anchored by an
  // lgamma evaluation at the mode only.
  const double nd = static_cast<double>(n);
  std::int64_t mode = static_cast<std::int64_t>((nd + 1.0) * p);
  if (mode > n) mode = n;
  const double log_pmf_mode =
      std::lgamma(nd + 1.0) - std::lgamma(static_cast<double>(mode) + 1.0) -
      std::lgamma(nd - static_cast<double>(mode) + 1.0) +
      static_cast<double>(mode) * std::log(p) +
      (nd - static_cast<double>(mode)) * std::log1p(-p);
  const double pmf_mode = std::exp(log_pmf_mode);
  const double odds = p / (1.0 - p);

  double cumulative = pmf_mode;
  if (u <= cumulative) return mode;

  std::int64_t lo = mode;       // lowest value already visited
  std::int64_t hi = mode;       // highest value already visited
  double pmf_lo = pmf_mode;     // pmf at lo
  double pmf_hi = pmf_mode;     // pmf at hi
  while (lo > 0 || hi < n) {
    if (hi < n) {
      pmf_hi *= odds * static_cast<double>(n - hi) /
                static_cast<double>(hi + 1);
      ++hi;
      cumulative += pmf_hi;
      if (u <= cumulative) return hi;
    }
    if (lo > 0) {
      pmf_lo *= static_cast<double>(lo) /
                (odds * static_cast<double>(n - lo + 1));
      --lo;
      cumulative += pmf_lo;
      if (u <= cumulative) return lo;
    }
    // Both running masses can underflow to zero before the support is
    // exhausted; the remaining tail mass is then below representable
    // resolution and the nearest unvisited side is as good as exact.
    if (pmf_lo == 0.0 && pmf_hi == 0.0) break;
  }
  return u < 0.5 ? lo : hi;
}

}  // namespace longswap
