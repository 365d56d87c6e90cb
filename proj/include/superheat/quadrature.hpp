#pragma once

#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "superheat/common.hpp"

namespace superheat {

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1].
struct GK15 {
  static constexpr double xgk[8] = {
      0.991455371120813, 0.949107912342759, 0.864864423359769,
      0.741531185599394, 0.586087235467691, 0.405845151377397,
      0.207784955007898, 0.000000000000000};
  static constexpr double wgk[8] = {
      0.022935322010529, 0.063092092629979, 0.104790010322250,
      0.140653259715525, 0.169004726639267, 0.190350578064785,
      0.204432940075298, 0.209482141084728};
  static constexpr double wg[4] = {
      0.129484966168870, 0.279705391489277, 0.381830050505119,
      0.417959183673469};
};

template <class F>
inline void gk15(const F& f, double a, double b, double& result, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  // Kronrod points symmetric about the center; index 7 is the center.
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * GK15::xgk[i]);
    fv[14 - i] = f(c + h * GK15::xgk[i]);
  }
  fv[7] = f(c);
  double resk = GK15::wgk[7] * fv[7];
  double resg = GK15::wg[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    resk += GK15::wgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) resg += GK15::wg[i / 2] * (fv[i] + fv[14 - i]);
  }
  result = resk * h;
  err = std::abs((resk - resg) * h);
}

}  // namespace detail

// Adaptive Gauss-Kronrod on a finite interval. Splits the worst interval
// until the summed error estimate satisfies the mixed tolerance.
template <class F>
inline double integrate_adaptive(const F& f, double a, double b,
                                 double rel_tol = 1e-12,
                                 double abs_tol = 1e-300,
                                 int max_intervals = 4000) {
  if (a == b) return 0.0;
  struct Piece {
    double a, b, value, err;
    bool operator<(const Piece& o) const { return err < o.err; }
  };
  std::priority_queue<Piece> q;
  Piece p0{a, b, 0, 0};
  detail::gk15(f, a, b, p0.value, p0.err);
  q.push(p0);
  double total = p0.value, total_err = p0.err;
  int n = 1;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) &&
         n < max_intervals) {
    Piece worst = q.top();
    q.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      q.push(worst);
      break;  // interval exhausted at double precision
    }
    Piece l{worst.a, mid, 0, 0}, r{mid, worst.b, 0, 0};
    detail::gk15(f, l.a, l.b, l.value, l.err);
    detail::gk15(f, r.a, r.b, r.value, r.err);
    total += l.value + r.value - worst.value;
    total_err += l.err + r.err - worst.err;
    q.push(l);
    q.push(r);
    ++n;
  }
  return total;
}

}  // namespace superheat
