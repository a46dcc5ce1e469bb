#ifndef LONGSWAP_RNG_HPP
#define LONGSWAP_RNG_HPP

#include <array>
#include <cstdint>

namespace longswap {

// Philox 4x32 block function with 10 rounds. It acts as a small block cipher
// over the counter, so a draw is a pure function of (key, counter) and the
// same logical draw gives the same value on every platform, thread schedule,
// and call order.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Stream identifiers keep draws for different purposes decorrelated even when
// they share a seed and a path index.
namespace rng_stream {
inline constexpr std::uint32_t period_innovation = 1;  // kappa random walk
inline constexpr std::uint32_t cell_noise = 2;         // per-cell overdispersion
inline constexpr std::uint32_t cohort_lives = 3;       // binomial death draws
inline constexpr std::uint32_t scenario_pick = 4;      // scenario index per chain
}  // namespace rng_stream

// One logical random stream addressed by (seed, stream, path). Every draw is
// an independent Philox block whose counter encodes the stream id, the path
// index, and the draw index, so draws can be taken in any order, from any
// thread, without coordination.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t path);

  // Uniform draw on the open interval (0, 1) at the given draw index.
  double uniform_at(std::uint64_t index) const;

  // Standard normal draw at the given draw index (Box-Muller on one block).
  double normal_at(std::uint64_t index) const;

  // Sequential variants sharing the same indexing, for callers that walk a
  // stream front to back.
  double uniform() { return uniform_at(next_++); }
  double normal() { return normal_at(next_++); }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_;
  std::uint64_t path_;
  std::uint64_t next_ = 0;
};

// Maps one uniform draw to a Binomial(n, p) variate by inverting the CDF in
// an order that starts at the distribution mode and alternates outward, so
// the expected work is O(sqrt(n p (1-p))) rather than O(n p). Inversion from
// a single uniform keeps chain sampling reproducible under any threading.
// Edge cases: p <= 0 returns 0, p >= 1 returns n, and if accumulated mass
// falls short of u through rounding the nearest still-open support end is
// returned.
std::int64_t binomial_from_uniform(double u, std::int64_t n, double p);

}  // namespace longswap

#endif  // LONGSWAP_RNG_HPP
