#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace seatcast {

/// psi(x) for x > 0: upward recurrence to x >= 10, then the asymptotic series.
template <typename Scalar>
Scalar digamma(Scalar x) {
  if (!(x > Scalar(0))) throw std::domain_error("digamma: argument must be positive");
  Scalar result = 0;
  while (x < Scalar(10)) {
    result -= Scalar(1) / x;
    x += Scalar(1);
  }
  const Scalar inv = Scalar(1) / x;
  const Scalar inv2 = inv * inv;
  const Scalar series =
      inv2 * (Scalar(1) / 12 -
              inv2 * (Scalar(1) / 120 -
                      inv2 * (Scalar(1) / 252 -
                      inv2 * (Scalar(1) / 240 - inv2 * (Scalar(1) / 132 - inv2 * (Scalar(691) / 32760))))));
  return result + std::log(x) - Scalar(0.5) * inv - series;
}

/// psi'(x) for x > 0.
template <typename Scalar>
Scalar trigamma(Scalar x) {
  if (!(x > Scalar(0))) throw std::domain_error("trigamma: argument must be positive");
  Scalar result = 0;
  while (x < Scalar(10)) {
    result += Scalar(1) / (x * x);
    x += Scalar(1);
  }
  const Scalar inv = Scalar(1) / x;
  const Scalar inv2 = inv * inv;
  const Scalar series =
      inv * (Scalar(1) + inv * (Scalar(0.5) +
                                inv * (Scalar(1) / 6 -
                                       inv2 * (Scalar(1) / 30 -
                                               inv2 * (Scalar(1) / 42 -
                                                       inv2 * (Scalar(1) / 30 - inv2 * (Scalar(5) / 66)))))));
  return result + series;
}

/// Solves psi(x) = y for x > 0. Minka's initialiser followed by Newton steps.
template <typename Scalar>
Scalar inverse_digamma(Scalar y) {
  constexpr Scalar kEulerGamma = Scalar(0.57721566490153286061);
  Scalar x = y >= Scalar(-2.22) ? std::exp(y) + Scalar(0.5) : Scalar(-1) / (y + kEulerGamma);
  for (int it = 0; it < 50; ++it) {
    const Scalar step = (digamma(x) - y) / trigamma(x);
    Scalar next = x - step;
    // Newton can overshoot below zero for very negative y; fall back to halving.
    if (!(next > Scalar(0))) next = x / 2;
    if (std::abs(next - x) <= std::numeric_limits<Scalar>::epsilon() * 4 * next) return next;
    x = next;
  }
  return x;
}

}  // namespace seatcast
