#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gevfit/errors.hpp"

namespace gevfit {

/// Below this |xi| the Gumbel (xi = 0) formulas are used.
inline constexpr double kGumbelThreshold = 1e-8;

/// A GEV parameter point (tau, mu, xi).
template <typename Scalar = double>
struct GevParams {
  Scalar tau{1};
  Scalar mu{0};
  Scalar xi{0};

  GevParams() = default;
  GevParams(Scalar tau_, Scalar mu_, Scalar xi_) : tau(tau_), mu(mu_), xi(xi_) {
    using std::isfinite;
    if (!(tau > Scalar(0)) || !isfinite(tau)) throw DomainError("GEV scale tau must be positive and finite");
    if (!isfinite(mu) || !isfinite(xi)) throw DomainError("GEV location and shape must be finite");
  }

  [[nodiscard]] bool is_gumbel() const { return std::abs(xi) < Scalar(kGumbelThreshold); }

  /// Finite support endpoint mu - tau/xi; throws ZeroShape for xi == 0.
  [[nodiscard]] Scalar beta() const {
    if (xi == Scalar(0)) throw ZeroShape("beta = mu - tau/xi is undefined for xi = 0");
    return mu - tau / xi;
  }

  template <typename Other>
  [[nodiscard]] GevParams<Other> cast() const {
    return GevParams<Other>(static_cast<Other>(tau), static_cast<Other>(mu), static_cast<Other>(xi));
  }

  friend bool operator==(const GevParams&, const GevParams&) = default;
};

using Params = GevParams<double>;

template <typename Scalar>
Scalar beta_of(const GevParams<Scalar>& p) {
  return p.beta();
}

/// Support interval of P_theta: (beta, +inf) for xi > 0, (-inf, beta) for xi < 0.
template <typename Scalar>
std::pair<Scalar, Scalar> endpoints(const GevParams<Scalar>& p) {
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  if (p.xi > Scalar(0)) return {p.beta(), inf};
  if (p.xi < Scalar(0)) return {-inf, p.beta()};
  return {-inf, inf};
}

/// Immutable batch of finite observations. Keeps the ascending order used by
/// the estimators and the original order needed for block maxima.
class DataSample {
 public:
  explicit DataSample(std::vector<double> values);
  explicit DataSample(const Eigen::Ref<const Eigen::ArrayXd>& values);

  [[nodiscard]] const Eigen::ArrayXd& values() const noexcept { return sorted_; }
  [[nodiscard]] const Eigen::ArrayXd& original() const noexcept { return original_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return sorted_.size(); }
  [[nodiscard]] double y_min() const noexcept { return sorted_(0); }
  [[nodiscard]] double y_max() const noexcept { return sorted_(sorted_.size() - 1); }
  [[nodiscard]] double range() const noexcept { return y_max() - y_min(); }
  /// FNV-1a over the sorted values' bit patterns.
  [[nodiscard]] std::uint64_t fingerprint() const noexcept;

  /// Affine image a*Y + c with a > 0.
  [[nodiscard]] DataSample affine(double a, double c) const;

 private:
  void validate_and_sort();

  Eigen::ArrayXd original_;
  Eigen::ArrayXd sorted_;
};

/// w_i = 1 + xi (Y_i - mu)/tau for an in-support point with xi != 0.
struct StandardizedValues {
  Eigen::ArrayXd w;
  Params theta;
};

template <typename Scalar>
bool support_contains(const GevParams<Scalar>& p, Scalar y_min, Scalar y_max) {
  if (p.xi > Scalar(0)) return p.beta() < y_min;
  if (p.xi < Scalar(0)) return p.beta() > y_max;
  return true;
}

inline bool support_contains(const Params& p, const DataSample& data) {
  return support_contains(p, data.y_min(), data.y_max());
}

StandardizedValues standardize(const Params& p, const DataSample& data);

/// Log-likelihood of an array of observations; -inf outside the support.
///
/// Uses t_i = log1p(xi z_i)/xi with z_i = (y_i - mu)/tau so that
/// L = -n log tau - (1 + xi) sum t_i - sum exp(-t_i) stays continuous through
/// xi = 0. The last sum is accumulated with a max shift.
template <typename Derived>
typename Derived::Scalar log_likelihood(const GevParams<typename Derived::Scalar>& p,
                                        const Eigen::ArrayBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using std::exp;
  using std::log;
  const Scalar neg_inf = -std::numeric_limits<Scalar>::infinity();
  const auto n = static_cast<Scalar>(y.size());
  const Array z = (y.derived() - p.mu) / p.tau;
  Array t;
  if (p.is_gumbel()) {
    t = z;
  } else {
    const Array xz = p.xi * z;
    if ((xz <= Scalar(-1)).any()) return neg_inf;
    t = xz.log1p() / p.xi;
  }
  const Scalar shift = (-t).maxCoeff();
  const Scalar log_sum_pow = shift + log((-t - shift).exp().sum());
  const Scalar sum_pow = exp(log_sum_pow);
  if (!std::isfinite(static_cast<double>(sum_pow))) return neg_inf;
  return -n * log(p.tau) - (Scalar(1) + p.xi) * t.sum() - sum_pow;
}

inline double log_likelihood(const Params& p, const DataSample& data) {
  return log_likelihood(p, data.values());
}

/// Log-density at a single point; -inf outside the support.
template <typename Scalar>
Scalar log_density(const GevParams<Scalar>& p, Scalar y) {
  using std::exp;
  using std::log;
  using std::log1p;
  const Scalar z = (y - p.mu) / p.tau;
  Scalar t = z;
  if (!p.is_gumbel()) {
    if (p.xi * z <= Scalar(-1)) return -std::numeric_limits<Scalar>::infinity();
    t = log1p(p.xi * z) / p.xi;
  }
  return -log(p.tau) - (Scalar(1) + p.xi) * t - exp(-t);
}

template <typename Scalar>
Scalar cdf(const GevParams<Scalar>& p, Scalar y) {
  using std::exp;
  using std::log1p;
  const Scalar z = (y - p.mu) / p.tau;
  if (p.is_gumbel()) return exp(-exp(-z));
  if (p.xi * z <= Scalar(-1)) return p.xi > Scalar(0) ? Scalar(0) : Scalar(1);
  return exp(-exp(-log1p(p.xi * z) / p.xi));
}

/// Inverse CDF; throws DomainError unless 0 < prob < 1.
template <typename Scalar>
Scalar quantile(const GevParams<Scalar>& p, Scalar prob) {
  using std::expm1;
  using std::log;
  if (!(prob > Scalar(0) && prob < Scalar(1))) throw DomainError("quantile probability must lie in (0, 1)");
  const Scalar e = -log(prob);
  if (p.is_gumbel()) return p.mu - p.tau * log(e);
  return p.mu + p.tau * expm1(-p.xi * log(e)) / p.xi;
}

/// n iid draws by inversion of uniforms from a seeded stream.
DataSample sample(const Params& p, Eigen::Index n, std::uint64_t seed);

/// (Y_(1), Y_(n)) of sample(p, n, seed) without materializing the sample.
std::pair<double, double> sample_extremes(const Params& p, Eigen::Index n, std::uint64_t seed);

}  // namespace gevfit
