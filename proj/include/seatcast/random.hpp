#pragma once

#include <cstdint>
#include <random>

#include "seatcast/core.hpp"

namespace seatcast {

/// Every simulation owns one of these; there is no global generator.
using Rng = std::mt19937_64;

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for stream `index` of `master`. Distinct indices give unrelated streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(master, a), b);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Draws a fresh 64-bit seed from an existing stream.
inline std::uint64_t draw_seed(Rng& rng) { return rng(); }

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Index k drawn with probability weights(k) / sum(weights).
template <typename Derived>
Index sample_categorical(const Eigen::DenseBase<Derived>& weights, double total, Rng& rng) {
  const double target = uniform01(rng) * total;
  double acc = 0;
  const Index last = weights.size() - 1;
  for (Index k = 0; k < last; ++k) {
    acc += static_cast<double>(weights(k));
    if (target < acc) return k;
  }
  return last;
}

std::int64_t sample_binomial(std::int64_t n, double p, Rng& rng);

/// Counts of n draws over categories with probabilities proportional to `probs`.
CountVector sample_multinomial(std::int64_t n, const Eigen::Ref<const Eigen::VectorXd>& probs, Rng& rng);

/// n draws without replacement from an urn holding `population(k)` balls of colour k.
CountVector sample_multivariate_hypergeometric(std::int64_t n, const Eigen::Ref<const CountVector>& population,
                                               Rng& rng);

/// Gamma(shape, 1) by Marsaglia-Tsang; shapes below 1 use the u^(1/a) boost.
double sample_gamma(double shape, Rng& rng);

/// log of a Gamma(shape, 1) variate; stays finite for tiny shapes where the variate underflows.
double sample_log_gamma(double shape, Rng& rng);

}  // namespace seatcast
