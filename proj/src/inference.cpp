#include "gevfit/inference.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "gevfit/format.hpp"
#include "gevfit/rng.hpp"

namespace gevfit {
namespace {

constexpr double kSeriesBelow = 0.05;
constexpr int kSeriesTerms = 24;
constexpr double kMaxCondition = 1e12;

// phi(x) = (x/(1+x) - log1p(x)) / x^2, so that dt/dxi = z^2 phi(xi z).
double phi(double x) {
  if (std::abs(x) < kSeriesBelow) {
    double sum = 0.0;
    double pw = 1.0;
    for (int k = 0; k < kSeriesTerms; ++k) {
      sum += ((k % 2 == 0) ? -1.0 : 1.0) * (k + 1.0) / (k + 2.0) * pw;
      pw *= x;
    }
    return sum;
  }
  return (x / (1.0 + x) - std::log1p(x)) / (x * x);
}

// psi(x) = -(1/(1+x)^2 + 2 phi(x)) / x, so that d^2t/dxi^2 = z^3 psi(xi z).
double psi(double x) {
  if (std::abs(x) < kSeriesBelow) {
    double sum = 0.0;
    double pw = 1.0;
    for (int j = 0; j < kSeriesTerms; ++j) {
      sum += ((j % 2 == 0) ? 1.0 : -1.0) * (j + 1.0) * (j + 2.0) / (j + 3.0) * pw;
      pw *= x;
    }
    return sum;
  }
  const double w = 1.0 + x;
  return -(1.0 / (w * w) + 2.0 * phi(x)) / x;
}

}  // namespace

HessianMatrix hessian(const Params& theta, const DataSample& data) {
  if (!support_contains(theta, data)) throw OutOfSupport("hessian: parameter point outside the support");
  const double tau = theta.tau;
  const double xi = theta.xi;
  const bool gumbel = theta.is_gumbel();
  const double tau2 = tau * tau;
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (const double y : data.values()) {
    const double z = (y - theta.mu) / tau;
    const double x = gumbel ? 0.0 : xi * z;
    const double w = 1.0 + x;
    const double t = gumbel ? z : std::log1p(x) / xi;
    const double e = std::exp(-t);
    // First and second derivatives of t in (mu, tau, xi).
    const Eigen::Vector3d dt(-1.0 / (tau * w), -z / (tau * w), z * z * phi(x));
    Eigen::Matrix3d d2t;
    const double w2 = w * w;
    d2t(kMu, kMu) = -xi / (w2 * tau2);
    d2t(kMu, kTau) = -xi * z / (w2 * tau2) + 1.0 / (w * tau2);
    d2t(kTau, kTau) = -xi * z * z / (w2 * tau2) + 2.0 * z / (w * tau2);
    d2t(kMu, kXi) = z / (w2 * tau);
    d2t(kTau, kXi) = z * z / (w2 * tau);
    d2t(kXi, kXi) = z * z * z * psi(x);
    d2t(kTau, kMu) = d2t(kMu, kTau);
    d2t(kXi, kMu) = d2t(kMu, kXi);
    d2t(kXi, kTau) = d2t(kTau, kXi);
    // l = -log tau - (1 + xi) t - exp(-t)
    h.noalias() += -e * dt * dt.transpose() + (e - 1.0 - xi) * d2t;
    h.row(kXi) -= dt.transpose();
    h.col(kXi) -= dt;
  }
  h(kTau, kTau) += static_cast<double>(data.size()) / tau2;
  // Vectorized accumulation may round the two triangles differently.
  h.triangularView<Eigen::StrictlyLower>() = h.transpose();
  return {h, theta};
}

Eigen::Vector3d score_identities(const Params& theta, const DataSample& data) {
  const StandardizedValues sv = standardize(theta, data);
  const double xi = theta.xi;
  const double n = static_cast<double>(data.size());
  const Eigen::ArrayXd lw = sv.w.log();
  const Eigen::ArrayXd pw = (-lw / xi).exp();
  const Eigen::ArrayXd inv_w = sv.w.inverse();
  Eigen::Vector3d r;
  r(0) = ((1.0 + xi) * inv_w.sum() - (pw * inv_w).sum()) / n;
  r(1) = (pw.sum() - n) / n;
  r(2) = (lw.sum() - n * xi - (pw * lw).sum()) / n;
  return r;
}

std::optional<Eigen::Vector3d> standard_errors(const HessianMatrix& h) {
  const Eigen::Matrix3d info = -h.matrix;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(info);
  const Eigen::Vector3d ev = eig.eigenvalues();
  const double largest = ev.cwiseAbs().maxCoeff();
  const double smallest = ev.cwiseAbs().minCoeff();
  if (!(smallest > 0.0) || largest / smallest > kMaxCondition)
    throw SingularInformation("observed information is numerically singular (condition number above 1e12)");
  if (ev.minCoeff() <= 0.0) return std::nullopt;
  const Eigen::Matrix3d cov = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  return cov.diagonal().cwiseSqrt().eval();
}

InferenceResult infer(const Params& theta_hat, const DataSample& data) {
  InferenceResult r;
  r.hessian = hessian(theta_hat, data);
  r.observed_info = -r.hessian.matrix;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(r.observed_info, Eigen::EigenvaluesOnly);
  const Eigen::Vector3d ev = eig.eigenvalues();
  r.neg_definite = ev.minCoeff() > 0.0;
  r.condition_number = ev.cwiseAbs().minCoeff() > 0.0 ? ev.cwiseAbs().maxCoeff() / ev.cwiseAbs().minCoeff()
                                                      : std::numeric_limits<double>::infinity();
  if (theta_hat.xi > -0.5 && r.neg_definite && r.condition_number <= kMaxCondition)
    r.se = standard_errors(r.hessian);
  return r;
}

ConcavityScan local_concavity_scan(const Params& theta_hat, const DataSample& data, double radius, int probes,
                                   std::uint64_t seed) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw PreconditionViolated("concavity scan radius must be >= 0");
  if (probes < 8) throw PreconditionViolated("concavity scan needs at least the 8 box corners");
  if (theta_hat.is_gumbel()) throw PreconditionViolated("concavity scan is parameterized by beta and needs xi != 0");
  const double beta_hat = theta_hat.beta();
  ConcavityScan scan;
  scan.worst_eigenvalue = std::numeric_limits<double>::infinity();
  UniformStream uniform(seed);
  for (int k = 0; k < probes; ++k) {
    Eigen::Vector3d offset;  // (tau, beta, xi) in [-1, 1]^3
    if (k < 8) {
      offset << ((k & 1) ? 1.0 : -1.0), ((k & 2) ? 1.0 : -1.0), ((k & 4) ? 1.0 : -1.0);
    } else {
      for (int j = 0; j < 3; ++j) offset(j) = 2.0 * uniform() - 1.0;
    }
    const double tau = theta_hat.tau + radius * offset(0);
    const double beta = beta_hat + radius * offset(1);
    const double xi = theta_hat.xi + radius * offset(2);
    if (!(tau > 0.0) || std::abs(xi) < kGumbelThreshold) {
      ++scan.skipped;
      continue;
    }
    const Params p(tau, beta + tau / xi, xi);
    if (!support_contains(p, data)) {
      ++scan.skipped;
      continue;
    }
    const Eigen::Matrix3d info = -hessian(p, data).matrix;
    const double lam = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(info, Eigen::EigenvaluesOnly).eigenvalues()(0);
    scan.probes.push_back({p, lam});
    ++scan.evaluated;
    scan.worst_eigenvalue = std::min(scan.worst_eigenvalue, lam);
    if (!(lam > 0.0)) scan.all_negative_definite = false;
  }
  if (scan.evaluated == 0) scan.all_negative_definite = false;
  return scan;
}

void write_csv(std::ostream& out, const ConcavityScan& scan) {
  out << "tau,mu,xi,min_info_eigenvalue\n";
  for (const auto& p : scan.probes) {
    out << format_double(p.theta.tau) << ',' << format_double(p.theta.mu) << ',' << format_double(p.theta.xi)
        << ',' << format_double(p.min_info_eigenvalue) << '\n';
  }
}

}  // namespace gevfit
