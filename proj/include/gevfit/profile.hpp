#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gevfit/gev.hpp"

namespace gevfit {

/// Default relative tolerance of the slice root.
inline constexpr double kDefaultBetaTol = 1e-12;

/// Inside (-kAnalyticDerivFrom, kAnalyticDerivFrom) the profile derivative is
/// taken by finite differences; the analytic form cancels catastrophically.
inline constexpr double kAnalyticDerivFrom = 1e-4;

/// Maximizer of the log-likelihood on the fixed-xi cross section.
struct ProfilePoint {
  double xi{};
  double beta_n{};  ///< NaN on the Gumbel slice
  double tau_n{};
  double mu_n{};
  double pl{};        ///< PL_n(xi)
  double pl_deriv{};  ///< PL'_n(xi)
  int solver_iterations{};
  /// s = xi (Y_ref - beta_n) > 0, the gap between beta_n and the nearest
  /// observation scaled by xi (Y_ref = Y_(1) for xi > 0, Y_(n) for xi < 0).
  /// Zero on the Gumbel slice.
  double boundary_gap{};

  [[nodiscard]] bool gumbel() const noexcept { return boundary_gap == 0.0; }
  [[nodiscard]] Params theta() const { return {tau_n, mu_n, xi}; }
};

struct CurveFailure {
  double xi;
  std::string what;
};

struct DataFingerprint {
  Eigen::Index n{};
  double y_min{};
  double y_max{};
  std::uint64_t hash{};
};

/// Profile points on an increasing xi grid. Points are evaluated sequentially,
/// each root search warm-started from the previous point.
struct ProfileCurve {
  std::vector<ProfilePoint> points;
  std::vector<CurveFailure> failures;
  DataFingerprint data;
};

/// H_n(beta): strictly increasing in beta on its domain, zero at beta_n(xi).
double h_n(double beta, double xi, const DataSample& data);

/// Unique root beta_n(xi) of H_n. Throws BracketFailure when no sign change is
/// reachable in double precision (xi numerically at a bound).
double solve_beta(double xi, const DataSample& data, double tol = kDefaultBetaTol);

/// tau = { (1/n) sum [xi (Y_i - beta)]^(-1/xi) }^(-xi).
double tau_of(double xi, double beta, const DataSample& data);

/// Cross-section maximizer and PL_n, PL'_n at xi. |xi| < 1e-8 delegates to
/// gumbel_cross_section. `warm_gap` seeds the root search with a nearby
/// boundary_gap.
ProfilePoint profile_loglik(double xi, const DataSample& data, double tol = kDefaultBetaTol,
                            std::optional<double> warm_gap = std::nullopt);

/// PL'_n(xi) at a solved point. Analytic for |xi| >= 1e-4, otherwise a
/// Richardson-extrapolated central difference of PL_n.
double profile_deriv(double xi, const DataSample& data, const ProfilePoint& point,
                     double tol = kDefaultBetaTol);

/// Maximizer of the Gumbel (xi = 0) log-likelihood.
ProfilePoint gumbel_cross_section(const DataSample& data, double tol = kDefaultBetaTol);

/// Evaluate the profile on a strictly increasing grid inside (-1, n - 1).
/// Per-point failures are recorded and skipped.
ProfileCurve curve(const DataSample& data, std::span<const double> xi_grid, double tol = kDefaultBetaTol);

/// CSV with header xi,beta_n,tau_n,mu_n,pl,pl_deriv,iters.
void write_csv(std::ostream& out, const ProfileCurve& c);

}  // namespace gevfit
