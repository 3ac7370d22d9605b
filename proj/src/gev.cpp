#include "gevfit/gev.hpp"

#include <algorithm>
#include <cstring>

#include "gevfit/rng.hpp"

namespace gevfit {

DataSample::DataSample(std::vector<double> values)
    : original_(Eigen::Map<const Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size()))) {
  validate_and_sort();
}

DataSample::DataSample(const Eigen::Ref<const Eigen::ArrayXd>& values) : original_(values) {
  validate_and_sort();
}

void DataSample::validate_and_sort() {
  if (original_.size() < 2) throw DegenerateData("a sample needs at least two observations");
  if (!original_.isFinite().all()) throw DomainError("observations must be finite");
  sorted_ = original_;
  std::sort(sorted_.data(), sorted_.data() + sorted_.size());
  if (sorted_(0) == sorted_(sorted_.size() - 1)) throw DegenerateData("all observations are equal");
}

std::uint64_t DataSample::fingerprint() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : sorted_) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

DataSample DataSample::affine(double a, double c) const {
  if (!(a > 0)) throw DomainError("affine scale must be positive");
  return DataSample(Eigen::ArrayXd(a * original_ + c));
}

StandardizedValues standardize(const Params& p, const DataSample& data) {
  if (p.xi == 0.0) throw ZeroShape("standardize requires xi != 0");
  Eigen::ArrayXd w = p.xi * (data.values() - p.beta()) / p.tau;
  if ((w <= 0.0).any()) throw OutOfSupport("parameter point puts observations outside the support");
  return {std::move(w), p};
}

DataSample sample(const Params& p, Eigen::Index n, std::uint64_t seed) {
  if (n < 2) throw DomainError("sample size must be at least 2");
  UniformStream uniform(seed);
  Eigen::ArrayXd draws(n);
  for (Eigen::Index i = 0; i < n; ++i) draws(i) = quantile(p, uniform());
  return DataSample(draws);
}

std::pair<double, double> sample_extremes(const Params& p, Eigen::Index n, std::uint64_t seed) {
  if (n < 2) throw DomainError("sample size must be at least 2");
  UniformStream uniform(seed);
  double lo = 1.0;
  double hi = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  // quantile is nondecreasing in u.
  return {quantile(p, lo), quantile(p, hi)};
}

}  // namespace gevfit
