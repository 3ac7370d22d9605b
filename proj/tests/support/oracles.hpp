#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's own derivative or quadrature code.

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "gevfit/gev.hpp"

namespace oracle {

/// Term-by-term log-likelihood with plain pow, in long double.
inline long double naive_loglik(const gevfit::Params& p, const std::vector<double>& y) {
  long double acc = 0;
  for (const double v : y) {
    const long double z = (static_cast<long double>(v) - p.mu) / p.tau;
    if (p.xi == 0.0) {
      acc += -std::log(static_cast<long double>(p.tau)) - z - std::exp(-z);
      continue;
    }
    const long double w = 1.0L + p.xi * z;
    if (w <= 0) return -std::numeric_limits<long double>::infinity();
    acc += -std::log(static_cast<long double>(p.tau)) - (1.0L + 1.0L / p.xi) * std::log(w) -
           std::pow(w, -1.0L / p.xi);
  }
  return acc;
}

/// Richardson-extrapolated central difference of f at x with step h.
inline long double richardson(const std::function<long double(long double)>& f, long double x, long double h) {
  const auto d = [&](long double s) { return (f(x + s) - f(x - s)) / (2 * s); };
  return (4 * d(h / 2) - d(h)) / 3;
}

/// Log-likelihood in long double at th = (mu, tau, xi), written directly
/// through t = log1p(xi z)/xi. There is no Gumbel cutoff: in long double the
/// form stays accurate for tiny nonzero xi.
inline long double loglik_ld(const Eigen::Array<long double, 3, 1>& th, const Eigen::ArrayXd& y) {
  const long double mu = th(0);
  const long double tau = th(1);
  const long double xi = th(2);
  long double acc = 0;
  for (const double v : y) {
    const long double z = (static_cast<long double>(v) - mu) / tau;
    long double t = z;
    if (xi != 0) {
      if (xi * z <= -1) return -std::numeric_limits<long double>::infinity();
      t = std::log1p(xi * z) / xi;
    }
    acc += -std::log(tau) - (1 + xi) * t - std::exp(-t);
  }
  return acc;
}

/// Hessian in (mu, tau, xi) order by Richardson-extrapolated central
/// differences, each second difference built from four function values.
inline Eigen::Matrix3d fd_hessian(const gevfit::Params& p, const Eigen::ArrayXd& y, double rel_step = 1e-3) {
  using V = Eigen::Array<long double, 3, 1>;
  const V x0(p.mu, p.tau, p.xi);
  const V step(rel_step * p.tau, rel_step * p.tau, rel_step);
  Eigen::Matrix3d h;
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      const auto second = [&](long double s) {
        V ea = V::Zero();
        V eb = V::Zero();
        ea(a) = s * step(a);
        eb(b) = s * step(b);
        return (loglik_ld(x0 + ea + eb, y) - loglik_ld(x0 + ea - eb, y) - loglik_ld(x0 - ea + eb, y) +
                loglik_ld(x0 - ea - eb, y)) /
               (4 * s * s * step(a) * step(b));
      };
      h(a, b) = h(b, a) = static_cast<double>((4 * second(0.5L) - second(1.0L)) / 3);
    }
  }
  return h;
}

/// Adaptive Simpson quadrature of f on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 40) {
  const auto rec = [&](auto&& self, double lo, double hi, double flo, double fmid, double fhi, double whole,
                       double eps, int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid);
    const double rm = 0.5 * (mid + hi);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (mid - lo) / 6 * (flo + 4 * flm + fmid);
    const double right = (hi - mid) / 6 * (fmid + 4 * frm + fhi);
    if (d <= 0 || std::abs(left + right - whole) <= 15 * eps) return left + right + (left + right - whole) / 15;
    return self(self, lo, mid, flo, flm, fmid, left, eps / 2, d - 1) +
           self(self, mid, hi, fmid, frm, fhi, right, eps / 2, d - 1);
  };
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return rec(rec, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, depth);
}

}  // namespace oracle
