#pragma once
/// One-dimensional root finding and minimization helpers.
///
/// Small, dependency-free routines used by the schedule scans: Brent's method
/// for bracketed roots and golden-section search for bracketed minima.  Both
/// assume the caller supplies a valid bracket.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace qaa {

/// Brent root finder on a sign-changing bracket [a, b].
/// `xtol` is the absolute abscissa tolerance.
template <typename F>
double brent_root(F&& f, double a, double b, double xtol = 1e-13,
                  int max_iter = 200) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw std::invalid_argument("brent_root: bracket does not change sign");
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // inverse quadratic / secant step
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
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
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  return b;
}

/// Golden-section minimum of a unimodal function on [a, b] to abscissa
/// tolerance `xatol`.  Returns the abscissa; `*fmin` (optional) receives the
/// best function value seen.
template <typename F>
double golden_min(F&& f, double a, double b, double xatol = 1e-12,
                  double* fmin = nullptr) {
  constexpr double gr = 0.6180339887498949;  // (sqrt(5)-1)/2
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xatol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  if (fc <= fd) {
    if (fmin) *fmin = fc;
    return c;
  }
  if (fmin) *fmin = fd;
  return d;
}

/// Bisection on a sign change of f over [lo, hi]; assumes f(lo), f(hi) have
/// opposite signs.  Returns the midpoint after `iters` halvings.
template <typename F>
double bisect_sign_change(F&& f, double lo, double hi, int iters = 80) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace qaa
