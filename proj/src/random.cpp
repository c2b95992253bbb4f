#include "seatcast/random.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace seatcast {

std::int64_t sample_binomial(std::int64_t n, double p, Rng& rng) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  const bool flip = p > 0.5;
  const double pp = flip ? 1.0 - p : p;
  std::int64_t x = 0;
  if (static_cast<double>(n) * pp < 64.0) {
    // Inversion from zero; cheap when the mean is small (batched SPM blocks).
    const double q = 1.0 - pp;
    const double s = pp / q;
    const double a = static_cast<double>(n + 1) * s;
    double r = std::pow(q, static_cast<double>(n));
    double u = uniform01(rng);
    while (u > r && x < n) {
      u -= r;
      ++x;
      r *= a / static_cast<double>(x) - s;
    }
  } else {
    x = std::binomial_distribution<std::int64_t>(n, pp)(rng);
  }
  return flip ? n - x : x;
}

CountVector sample_multinomial(std::int64_t n, const Eigen::Ref<const Eigen::VectorXd>& probs, Rng& rng) {
  if (n < 0) throw std::invalid_argument("sample_multinomial: negative trial count");
  CountVector out = CountVector::Zero(probs.size());
  double remaining_mass = probs.sum();
  std::int64_t remaining = n;
  const Index last = probs.size() - 1;
  for (Index k = 0; k < last && remaining > 0; ++k) {
    if (remaining_mass <= 0) break;
    const double p = std::min(1.0, probs(k) / remaining_mass);
    out(k) = sample_binomial(remaining, p, rng);
    remaining -= out(k);
    remaining_mass -= probs(k);
  }
  out(last) += remaining;
  return out;
}

CountVector sample_multivariate_hypergeometric(std::int64_t n, const Eigen::Ref<const CountVector>& population,
                                               Rng& rng) {
  std::int64_t total = population.sum();
  if (n < 0 || n > total) throw std::invalid_argument("sample_multivariate_hypergeometric: bad draw count");
  if (n == total) return population;
  CountVector left = population;
  CountVector out = CountVector::Zero(population.size());
  for (std::int64_t i = 0; i < n; ++i) {
    const Index k = sample_categorical(left, static_cast<double>(total), rng);
    out(k) += 1;
    left(k) -= 1;
    total -= 1;
  }
  return out;
}

double sample_gamma(double shape, Rng& rng) {
  if (!(shape > 0)) throw std::invalid_argument("sample_gamma: shape must be positive");
  if (shape < 1.0) {
    const double u = uniform01(rng);
    return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    double x;
    double v;
    do {
      x = normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_log_gamma(double shape, Rng& rng) {
  if (shape >= 1.0) return std::log(sample_gamma(shape, rng));
  const double u = uniform01(rng);
  // log(Gamma(a+1) * u^(1/a)); u == 0 has probability ~2^-53 but would give -inf.
  const double log_u = std::log(std::max(u, std::numeric_limits<double>::min()));
  return std::log(sample_gamma(shape + 1.0, rng)) + log_u / shape;
}

}  // namespace seatcast
