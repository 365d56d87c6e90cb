#pragma once

#include <cmath>
#include <limits>

#include "superheat/common.hpp"

namespace superheat {

namespace detail {

// Maclaurin series for erf, adequate for 0 <= x <= ~2.
inline double erf_series(double x) {
  // erf(x) = 2/sqrt(pi) * sum_{n>=0} (-1)^n x^{2n+1} / (n! (2n+1))
  double term = x;
  double sum = x;
  double x2 = x * x;
  for (int n = 1; n < 200; ++n) {
    term *= -x2 / n;
    double contrib = term / (2 * n + 1);
    sum += contrib;
    if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
  }
  return (2.0 / kSqrtPi) * sum;
}

// Modified Lentz evaluation of the classical continued fraction
//
//   sqrt(pi) e^{x^2} erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + 2/(x + ...)))))
//
// which converges quickly for x >= ~1.
inline double erfcx_cf(double x) {
  const double tiny = 1e-300;
  double f = x;
  if (f == 0) f = tiny;
  double C = f;
  double D = 0.0;
  for (int n = 1; n < 300; ++n) {
    double a = n * 0.5;  // a_n = n/2
    double b = x;
    D = b + a * D;
    if (D == 0) D = tiny;
    C = b + a / C;
    if (C == 0) C = tiny;
    D = 1.0 / D;
    double delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return 1.0 / (kSqrtPi * f);
}

}  // namespace detail

// Scaled complementary error function e^{x^2} erfc(x) for x >= 0.
inline double erfcx(double x) {
  if (x < 0) throw OutOfRange("erfcx: negative argument unsupported");
  if (x < 1.0) return std::exp(x * x) * (1.0 - detail::erf_series(x));
  return detail::erfcx_cf(x);
}

// Complementary error function for x >= 0. Underflows to 0 near x ~ 27.
inline double erfc_pos(double x) {
  if (x < 0) throw OutOfRange("erfc_pos: negative argument unsupported");
  if (x < 1.0) return 1.0 - detail::erf_series(x);
  return std::exp(-x * x) * detail::erfcx_cf(x);
}

// log of erfc for x >= 0, usable far beyond the underflow point of erfc.
inline double log_erfc_pos(double x) {
  if (x < 1.0) return std::log(erfc_pos(x));
  return -x * x + std::log(detail::erfcx_cf(x));
}

}  // namespace superheat
