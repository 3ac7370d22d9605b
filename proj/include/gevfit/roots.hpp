#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "gevfit/errors.hpp"

namespace gevfit {

struct RootResult {
  double x{};
  int iterations{};
};

/// Newton iteration kept inside a sign-change bracket [lo, hi]; falls back to
/// bisection whenever the Newton step leaves the bracket or stalls.
/// `fdf(x)` returns {f(x), f'(x)}. Stops when the step or bracket is below
/// `xtol`.
template <typename FDF>
RootResult safeguarded_newton(FDF&& fdf, double lo, double hi, double f_lo, double f_hi, double start,
                              double xtol, int max_iter = 200) {
  if (f_lo == 0.0) return {lo, 0};
  if (f_hi == 0.0) return {hi, 0};
  if ((f_lo > 0) == (f_hi > 0)) throw BracketFailure("safeguarded_newton: endpoints do not bracket a root");
  // Orient so that f(neg) < 0 < f(pos).
  double neg = f_lo < 0 ? lo : hi;
  double pos = f_lo < 0 ? hi : lo;
  double x = (start > std::min(lo, hi) && start < std::max(lo, hi)) ? start : 0.5 * (lo + hi);
  double dx_old = std::abs(hi - lo);
  for (int it = 1; it <= max_iter; ++it) {
    const auto [f, df] = fdf(x);
    if (f == 0.0 || !std::isfinite(f)) return {x, it};
    (f < 0 ? neg : pos) = x;
    const double a = std::min(neg, pos);
    const double b = std::max(neg, pos);
    const double step = f / df;
    // A converged step may round to x itself, which is now a bracket end.
    if (std::isfinite(step) && std::abs(step) < xtol) return {x - step, it};
    double next = x - step;
    const bool outside = !std::isfinite(next) || next <= a || next >= b;
    if (outside || std::abs(2.0 * f) > std::abs(dx_old * df)) next = 0.5 * (a + b);
    dx_old = std::abs(next - x);
    if (dx_old < xtol || (b - a) < xtol) return {next, it};
    x = next;
  }
  return {x, max_iter};
}

/// Brent's method on a sign-change bracket.
template <typename F>
RootResult brent(F&& f, double a, double b, double fa, double fb, double xtol, int max_iter = 200) {
  if (fa == 0.0) return {a, 0};
  if (fb == 0.0) return {b, 0};
  if ((fa > 0) == (fb > 0)) throw BracketFailure("brent: endpoints do not bracket a root");
  double c = b;
  double fc = fb;
  double d = b - a;
  double e = d;
  constexpr double eps = 2.220446049250313e-16;
  for (int it = 1; it <= max_iter; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return {b, it};
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw ConvergenceFailure("brent: iteration limit reached");
}

}  // namespace gevfit
