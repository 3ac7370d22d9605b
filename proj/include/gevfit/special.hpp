#pragma once

#include <cmath>
#include <numbers>

#include "gevfit/errors.hpp"

namespace gevfit {

/// Order b of the Gamma-function derivative Gamma^(b); only 0, 1, 2 are used.
class GammaDerivOrder {
 public:
  constexpr explicit GammaDerivOrder(int b) : b_(b) {
    if (b < 0 || b > 2) throw DomainError("Gamma derivative order must be 0, 1 or 2");
  }
  [[nodiscard]] constexpr int value() const noexcept { return b_; }

 private:
  int b_;
};

namespace detail {

// Arguments below this are shifted upward by recurrence before the
// asymptotic series is applied.
inline constexpr double kAsymptoticFrom = 8.0;

template <typename Scalar>
void require_positive(Scalar x, const char* what) {
  if (!(x > Scalar(0)) || !std::isfinite(static_cast<double>(x))) throw DomainError(what);
}

}  // namespace detail

/// log Gamma(x) for x > 0.
template <typename Scalar>
Scalar ln_gamma(Scalar x) {
  using std::log;
  detail::require_positive(x, "ln_gamma requires x > 0");
  Scalar shift_log{0};
  Scalar prod{1};
  while (x < Scalar(detail::kAsymptoticFrom)) {
    prod *= x;
    x += Scalar(1);
  }
  shift_log = log(prod);
  const Scalar r = Scalar(1) / x;
  const Scalar r2 = r * r;
  // Stirling series with Bernoulli-number coefficients B_2k / (2k (2k-1)).
  const Scalar series =
      r * (Scalar(1) / 12 +
           r2 * (Scalar(-1) / 360 +
                 r2 * (Scalar(1) / 1260 +
                       r2 * (Scalar(-1) / 1680 +
                             r2 * (Scalar(1) / 1188 + r2 * (Scalar(-691) / 360360 + r2 * (Scalar(1) / 156)))))));
  const Scalar half_log_two_pi = Scalar(0.5) * log(Scalar(2) * std::numbers::pi_v<Scalar>);
  return (x - Scalar(0.5)) * log(x) - x + half_log_two_pi + series - shift_log;
}

/// psi(x) = d/dx log Gamma(x) for x > 0.
template <typename Scalar>
Scalar digamma(Scalar x) {
  using std::log;
  detail::require_positive(x, "digamma requires x > 0");
  Scalar acc{0};
  while (x < Scalar(detail::kAsymptoticFrom)) {
    acc -= Scalar(1) / x;
    x += Scalar(1);
  }
  const Scalar r = Scalar(1) / x;
  const Scalar r2 = r * r;
  const Scalar series =
      r2 * (Scalar(-1) / 12 +
            r2 * (Scalar(1) / 120 +
                  r2 * (Scalar(-1) / 252 +
                        r2 * (Scalar(1) / 240 +
                              r2 * (Scalar(-1) / 132 + r2 * (Scalar(691) / 32760 + r2 * (Scalar(-1) / 12)))))));
  return acc + log(x) - Scalar(0.5) * r + series;
}

/// psi'(x) for x > 0.
template <typename Scalar>
Scalar trigamma(Scalar x) {
  detail::require_positive(x, "trigamma requires x > 0");
  Scalar acc{0};
  while (x < Scalar(detail::kAsymptoticFrom)) {
    acc += Scalar(1) / (x * x);
    x += Scalar(1);
  }
  const Scalar r = Scalar(1) / x;
  const Scalar r2 = r * r;
  const Scalar series =
      r * r2 *
      (Scalar(1) / 6 +
       r2 * (Scalar(-1) / 30 +
             r2 * (Scalar(1) / 42 +
                   r2 * (Scalar(-1) / 30 + r2 * (Scalar(5) / 66 + r2 * (Scalar(-691) / 2730 + r2 * (Scalar(7) / 6)))))));
  return acc + r + Scalar(0.5) * r2 + series;
}

/// Gamma^(b)(x): Gamma, Gamma psi, Gamma (psi^2 + psi').
template <typename Scalar>
Scalar gamma_deriv(GammaDerivOrder order, Scalar x) {
  using std::exp;
  detail::require_positive(x, "gamma_deriv requires x > 0");
  const Scalar g = exp(ln_gamma(x));
  switch (order.value()) {
    case 0:
      return g;
    case 1:
      return g * digamma(x);
    default: {
      const Scalar psi = digamma(x);
      return g * (psi * psi + trigamma(x));
    }
  }
}

}  // namespace gevfit
