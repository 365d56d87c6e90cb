#pragma once

#include <cmath>
#include <functional>

#include "superheat/common.hpp"

namespace superheat {

// Brent's method on [a, b] with sign change f(a)*f(b) <= 0.
template <class F>
inline double brent(const F& f, double a, double b, double fa, double fb,
                    double xtol = 0.0, int max_iter = 200) {
  if (fa == 0) return a;
  if (fb == 0) return b;
  if (fa * fb > 0) throw NoBracket("brent: no sign change on bracket");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol = 2 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                 0.5 * xtol;
    double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0) return b;
    if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
      d = e = m;  // bisection
    } else {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2 * m * s;
        q = 1 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        p = s * (2 * m * qq * (qq - r) - (b - a) * (r - 1));
        q = (qq - 1) * (r - 1) * (s - 1);
      }
      if (p > 0) q = -q; else p = -p;
      if (2 * p < std::min(3 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = e = m;
      }
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
    fb = f(b);
    if ((fb > 0) == (fc > 0)) {
      c = a; fc = fa;
      d = e = b - a;
    }
  }
  return b;
}

template <class F>
inline double brent(const F& f, double a, double b, double xtol = 0.0,
                    int max_iter = 200) {
  return brent(f, a, b, f(a), f(b), xtol, max_iter);
}

// Finds the root of a monotone decreasing function g with g(root) = 0 by
// expanding a bracket geometrically from `seed` and then running Brent.
// `lo_limit` bounds the left expansion (domain floor).
template <class F>
inline double solve_decreasing(const F& g, double seed, double lo_limit,
                               int max_expand = 200) {
  double lo = seed, hi = seed;
  double glo = g(lo);
  if (glo == 0) return lo;
  if (glo > 0) {
    // root lies to the right
    for (int i = 0; i < max_expand; ++i) {
      lo = hi;
      glo = g(lo);
      hi = hi * 2 + 1e-30;
      double ghi = g(hi);
      if (ghi <= 0) return brent(g, lo, hi, glo, ghi);
    }
    throw NoBracket("solve_decreasing: right expansion exhausted");
  }
  // root lies to the left
  for (int i = 0; i < max_expand; ++i) {
    hi = lo;
    double ghi = g(hi);
    lo = lo_limit + (lo - lo_limit) * 0.5;
    if (lo <= lo_limit) lo = lo_limit + (hi - lo_limit) * 1e-12;
    glo = g(lo);
    if (glo >= 0) return brent(g, lo, hi, glo, ghi);
    if (hi - lo_limit < 1e-300) break;
  }
  throw NoBracket("solve_decreasing: left expansion exhausted");
}

// Root of a monotone increasing function h with h(root) = target, expanding
// the bracket to the right from `seed` (seed must satisfy domain validity).
template <class F>
inline double solve_increasing(const F& h, double target, double seed,
                               int max_expand = 200) {
  auto g = [&](double s) { return h(s) - target; };
  double lo = seed, hi = seed;
  double glo = g(lo);
  if (glo == 0) return lo;
  if (glo < 0) {
    for (int i = 0; i < max_expand; ++i) {
      lo = hi;
      hi = hi * 2 + 1.0;
      if (g(hi) >= 0) return brent(g, lo, hi);
    }
    throw NoBracket("solve_increasing: right expansion exhausted");
  }
  for (int i = 0; i < max_expand; ++i) {
    hi = lo;
    lo = lo * 0.5 - 1.0;
    if (g(lo) <= 0) return brent(g, lo, hi);
  }
  throw NoBracket("solve_increasing: left expansion exhausted");
}

}  // namespace superheat
