#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gevfit/gev.hpp"

namespace gevfit {

/// Parameter order used by every matrix and vector in this module.
enum ParamIndex : int { kMu = 0, kTau = 1, kXi = 2 };

/// Hessian of L_n in (mu, tau, xi) order.
struct HessianMatrix {
  Eigen::Matrix3d matrix;
  Params at;
};

struct InferenceResult {
  HessianMatrix hessian;
  Eigen::Matrix3d observed_info;
  std::optional<Eigen::Vector3d> se;  ///< (se_mu, se_tau, se_xi)
  bool neg_definite{false};
  double condition_number{};
};

/// Analytic second derivatives, written through t = log1p(xi z)/xi with
/// series expansions of d t/d xi and d^2 t/d xi^2 for small |xi z|, so the
/// result is accurate for every xi including 0. Throws OutOfSupport.
HessianMatrix hessian(const Params& theta, const DataSample& data);

/// Normalized residuals (xi != 0) of the three likelihood-equation identities:
///   (1/n)[sum (1+xi) w^-1 - sum w^(-1-1/xi)],
///   (1/n)[sum w^(-1/xi) - n],
///   (1/n)[sum log w - n xi - sum w^(-1/xi) log w].
Eigen::Vector3d score_identities(const Params& theta, const DataSample& data);

/// Square roots of diag((-H)^-1) if -H is positive definite, nullopt
/// otherwise. Throws SingularInformation when cond(-H) > 1e12.
std::optional<Eigen::Vector3d> standard_errors(const HessianMatrix& h);

/// Observed information and Wald standard errors at a fitted point. Standard
/// errors are reported only for xi > -1/2.
InferenceResult infer(const Params& theta_hat, const DataSample& data);

struct ConcavityProbe {
  Params theta;
  /// Smallest eigenvalue of the observed information -H at the probe.
  double min_info_eigenvalue{};
};

struct ConcavityScan {
  bool all_negative_definite{true};
  double worst_eigenvalue{};  ///< min over probes of min_info_eigenvalue
  int evaluated{};
  int skipped{};  ///< probes outside the support
  std::vector<ConcavityProbe> probes;
};

/// Hessian definiteness over the box |tau - tau_hat| <= r, |beta - beta_hat|
/// <= r, |xi - xi_hat| <= r intersected with the support. The 8 box corners
/// are always probed; the remaining m - 8 probes are uniform in the box.
ConcavityScan local_concavity_scan(const Params& theta_hat, const DataSample& data, double radius, int probes,
                                   std::uint64_t seed = 0);

/// CSV with header tau,mu,xi,min_info_eigenvalue.
void write_csv(std::ostream& out, const ConcavityScan& scan);

}  // namespace gevfit
