#include "gevfit/profile.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "gevfit/format.hpp"
#include "gevfit/roots.hpp"

namespace gevfit {
namespace {

constexpr double kMinGap = 1e-290;
constexpr double kMaxGap = 1e290;
constexpr double kFdStep = 1e-3;

void require_xi_range(double xi, const DataSample& data) {
  const auto n = static_cast<double>(data.size());
  if (!(xi > -1.0 && xi < n - 1.0)) throw DomainError("xi must lie in (-1, n - 1)");
}

// One fixed-xi cross section, parameterized by the boundary gap
// s = xi (Y_ref - beta) so that delta_i = xi (Y_i - beta) = s + g_i with
// g_i = xi (Y_i - Y_ref) >= 0 computed once.
class Slice {
 public:
  Slice(double xi, const DataSample& data)
      : xi_(xi),
        power_(-1.0 / xi),
        n_(static_cast<double>(data.size())),
        ref_(xi > 0 ? data.y_min() : data.y_max()),
        g_(xi * (data.values() - ref_)) {}

  [[nodiscard]] double xi() const noexcept { return xi_; }
  [[nodiscard]] double beta(double s) const noexcept { return ref_ - s / xi_; }
  [[nodiscard]] double gap(double beta) const noexcept { return xi_ * (ref_ - beta); }

  // H_n at gap s and its derivative with respect to log s.
  [[nodiscard]] std::pair<double, double> h(double s) const {
    const Eigen::ArrayXd ell = (g_ / s).log1p();
    const Eigen::ArrayXd a = power_ * ell;
    const Eigen::ArrayXd e = (a - a.maxCoeff()).exp();
    const Eigen::ArrayXd r = s / (g_ + s);  // s / delta_i
    const Eigen::ArrayXd er = e * r;
    const double b = e.sum();
    const double as = er.sum();
    const double a2s = (er * r).sum();
    const double cs = r.sum();
    const double c2s = r.square().sum();
    const double bc = b * cs;
    const double h = as / bc - (xi_ + 1.0) / n_;
    const double dh = ((power_ - 1.0) * a2s * bc - as * (power_ * as * cs - b * c2s)) / (bc * bc);
    return {h, dh};
  }

  [[nodiscard]] ProfilePoint evaluate(double s) const {
    const Eigen::ArrayXd ell = (g_ / s).log1p();
    const double ell_mean = ell.mean();
    const Eigen::ArrayXd a = power_ * (ell - ell_mean);
    const double shift = a.maxCoeff();
    const Eigen::ArrayXd e = (a - shift).exp();
    const double b = e.sum();
    // log of (1/n) sum exp(power * (ell_i - mean ell)).
    const double lme = shift + std::log(b / n_);
    const double expo = ell_mean - xi_ * lme;

    ProfilePoint pt;
    pt.xi = xi_;
    pt.boundary_gap = s;
    pt.beta_n = beta(s);
    pt.tau_n = s * std::exp(expo);
    pt.mu_n = ref_ + s * std::expm1(expo) / xi_;
    pt.pl = -n_ * lme - n_ * std::log(s) - ell.sum() - n_;
    const double weighted_ell = (e * ell).sum() / b;
    pt.pl_deriv = -n_ / xi_ + n_ / (xi_ * xi_) * (ell_mean - weighted_ell);
    return pt;
  }

 private:
  double xi_;
  double power_;
  double n_;
  double ref_;
  Eigen::ArrayXd g_;
};

// Root of H_n in u = log s. H_n has the sign of xi as s -> 0 and the
// opposite sign as s -> inf.
RootResult solve_log_gap(const Slice& slice, double range, double tol, std::optional<double> warm) {
  const double near_sign = slice.xi() > 0 ? 1.0 : -1.0;
  auto h_at = [&](double u) { return slice.h(std::exp(u)); };
  auto is_near = [&](double h) { return h * near_sign > 0; };
  const double u_min = std::log(kMinGap);
  const double u_max = std::log(kMaxGap);

  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
  int evals = 0;
  if (warm && *warm > kMinGap && *warm < kMaxGap) {
    double u0 = std::log(*warm);
    double f0 = h_at(u0).first;
    ++evals;
    if (f0 == 0.0) return {u0, evals};
    const double dir = is_near(f0) ? 1.0 : -1.0;
    double step = 0.25;
    for (;;) {
      const double u1 = u0 + dir * step;
      if (u1 < u_min || u1 > u_max) throw BracketFailure("slice root: bracket expansion left double range");
      const double f1 = h_at(u1).first;
      ++evals;
      if (f1 == 0.0) return {u1, evals};
      if (is_near(f1) != is_near(f0)) {
        lo = std::min(u0, u1);
        hi = std::max(u0, u1);
        f_lo = u0 < u1 ? f0 : f1;
        f_hi = u0 < u1 ? f1 : f0;
        break;
      }
      u0 = u1;
      f0 = f1;
      step *= 2.0;
    }
  } else {
    const double scale = std::abs(slice.xi()) * range;
    lo = std::log(scale * 1e-9);
    hi = std::log(scale);
    f_lo = h_at(lo).first;
    f_hi = h_at(hi).first;
    evals += 2;
    for (double step = std::log(2.0); f_lo != 0.0 && !is_near(f_lo); step *= 2.0) {
      hi = lo;
      f_hi = f_lo;
      lo -= step;
      if (lo < u_min) throw BracketFailure("slice root: no sign change near the support boundary");
      f_lo = h_at(lo).first;
      ++evals;
    }
    for (double step = std::log(2.0); f_hi != 0.0 && is_near(f_hi); step *= 2.0) {
      lo = hi;
      f_lo = f_hi;
      hi += step;
      if (hi > u_max) throw BracketFailure("slice root: no sign change away from the support boundary");
      f_hi = h_at(hi).first;
      ++evals;
    }
  }
  RootResult root = safeguarded_newton(h_at, lo, hi, f_lo, f_hi, 0.5 * (lo + hi), tol);
  root.iterations += evals;
  return root;
}

ProfilePoint solve_slice(double xi, const DataSample& data, double tol, std::optional<double> warm) {
  const Slice slice(xi, data);
  const RootResult root = solve_log_gap(slice, data.range(), tol, warm);
  ProfilePoint pt = slice.evaluate(std::exp(root.x));
  pt.solver_iterations = root.iterations;
  return pt;
}

double pl_value(double xi, const DataSample& data, double tol) {
  if (std::abs(xi) < kGumbelThreshold) return gumbel_cross_section(data, tol).pl;
  return solve_slice(xi, data, tol, std::nullopt).pl;
}

// Richardson-extrapolated central difference of PL_n at xi.
double pl_deriv_fd(double xi, const DataSample& data, double tol) {
  auto central = [&](double h) { return (pl_value(xi + h, data, tol) - pl_value(xi - h, data, tol)) / (2.0 * h); };
  const double coarse = central(kFdStep);
  const double fine = central(0.5 * kFdStep);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace

double h_n(double beta, double xi, const DataSample& data) {
  require_xi_range(xi, data);
  if (xi == 0.0) throw ZeroShape("H_n is defined for xi != 0");
  const Slice slice(xi, data);
  const double s = slice.gap(beta);
  if (!(s > 0.0)) throw DomainError("beta lies outside the domain of H_n");
  return slice.h(s).first;
}

double solve_beta(double xi, const DataSample& data, double tol) {
  require_xi_range(xi, data);
  if (xi == 0.0) throw ZeroShape("beta_n is defined for xi != 0");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const Slice slice(xi, data);
  return slice.beta(std::exp(solve_log_gap(slice, data.range(), tol, std::nullopt).x));
}

double tau_of(double xi, double beta, const DataSample& data) {
  if (xi == 0.0) throw ZeroShape("tau_of is defined for xi != 0");
  const Slice slice(xi, data);
  const double s = slice.gap(beta);
  if (!(s > 0.0)) throw DomainError("beta lies outside the slice domain");
  return slice.evaluate(s).tau_n;
}

ProfilePoint profile_loglik(double xi, const DataSample& data, double tol, std::optional<double> warm_gap) {
  require_xi_range(xi, data);
  if (std::abs(xi) < kGumbelThreshold) return gumbel_cross_section(data, tol);
  ProfilePoint pt = solve_slice(xi, data, tol, warm_gap);
  if (std::abs(xi) < kAnalyticDerivFrom) pt.pl_deriv = pl_deriv_fd(xi, data, tol);
  return pt;
}

double profile_deriv(double xi, const DataSample& data, const ProfilePoint& point, double tol) {
  if (std::abs(xi) < kAnalyticDerivFrom || point.gumbel()) return pl_deriv_fd(xi, data, tol);
  return Slice(xi, data).evaluate(point.boundary_gap).pl_deriv;
}

ProfilePoint gumbel_cross_section(const DataSample& data, double tol) {
  const Eigen::ArrayXd z = data.values() - data.y_min();
  const double n = static_cast<double>(data.size());
  const double z_mean = z.mean();
  // f(tau) = tau - mean(z) + weighted mean of z under exp(-z/tau); increasing.
  auto fdf = [&](double tau) {
    const Eigen::ArrayXd e = (-z / tau).exp();
    const double sum_e = e.sum();
    const double m1 = (e * z).sum() / sum_e;
    const double m2 = (e * z.square()).sum() / sum_e;
    return std::pair{tau - z_mean + m1, 1.0 + (m2 - m1 * m1) / (tau * tau)};
  };
  const double hi = z_mean;  // f(mean z) >= 0
  double lo = 1e-3 * z_mean;
  double f_lo = fdf(lo).first;
  for (int k = 0; f_lo > 0.0; ++k) {
    if (k == 200) throw ConvergenceFailure("Gumbel cross section: no lower bracket for tau");
    lo *= 0.5;
    f_lo = fdf(lo).first;
  }
  constexpr int kMaxIter = 500;
  const RootResult root = safeguarded_newton(fdf, lo, hi, f_lo, fdf(hi).first, 0.5 * z_mean, tol * z_mean, kMaxIter);
  if (root.iterations >= kMaxIter) throw ConvergenceFailure("Gumbel cross section: iteration limit reached");
  const double tau = root.x;
  const double mu = data.y_min() - tau * std::log((-z / tau).exp().mean());

  ProfilePoint pt;
  pt.xi = 0.0;
  pt.beta_n = std::numeric_limits<double>::quiet_NaN();
  pt.tau_n = tau;
  pt.mu_n = mu;
  pt.pl = -n * std::log(tau) - ((data.values() - mu) / tau).sum() - n;
  pt.solver_iterations = root.iterations;
  pt.boundary_gap = 0.0;
  pt.pl_deriv = pl_deriv_fd(0.0, data, tol);
  return pt;
}

ProfileCurve curve(const DataSample& data, std::span<const double> xi_grid, double tol) {
  for (std::size_t i = 0; i < xi_grid.size(); ++i) {
    require_xi_range(xi_grid[i], data);
    if (i > 0 && !(xi_grid[i] > xi_grid[i - 1])) throw DomainError("xi grid must be strictly increasing");
  }
  ProfileCurve out;
  out.data = {data.size(), data.y_min(), data.y_max(), data.fingerprint()};
  out.points.reserve(xi_grid.size());
  std::optional<double> warm;
  double warm_xi = 0.0;
  for (const double xi : xi_grid) {
    const bool same_branch = warm && (warm_xi > 0) == (xi > 0);
    try {
      ProfilePoint pt = profile_loglik(xi, data, tol, same_branch ? warm : std::nullopt);
      if (!pt.gumbel()) {
        warm = pt.boundary_gap;
        warm_xi = xi;
      }
      out.points.push_back(pt);
    } catch (const Error& e) {
      out.failures.push_back({xi, e.what()});
    }
  }
  return out;
}

void write_csv(std::ostream& out, const ProfileCurve& c) {
  out << "xi,beta_n,tau_n,mu_n,pl,pl_deriv,iters\n";
  for (const auto& p : c.points) {
    out << format_double(p.xi) << ',' << format_double(p.beta_n) << ',' << format_double(p.tau_n) << ','
        << format_double(p.mu_n) << ',' << format_double(p.pl) << ',' << format_double(p.pl_deriv) << ','
        << p.solver_iterations << '\n';
  }
}

}  // namespace gevfit
