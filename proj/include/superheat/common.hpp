#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace superheat {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class TailDivergence : public Error { public: using Error::Error; };
class NonPositiveSource : public Error { public: using Error::Error; };
class OutOfRange : public Error { public: using Error::Error; };
class NoBracket : public Error { public: using Error::Error; };
class NonConvergent : public Error { public: using Error::Error; };
class EmptyBall : public Error { public: using Error::Error; };
class InsufficientLevels : public Error { public: using Error::Error; };
class CutoffTooSmall : public Error { public: using Error::Error; };
class ZeroField : public Error { public: using Error::Error; };
class RangeError : public Error { public: using Error::Error; };
class NotApplicable : public Error { public: using Error::Error; };
class NotConvex : public Error { public: using Error::Error; };
class InversionFailure : public Error { public: using Error::Error; };
class NoRoot : public Error { public: using Error::Error; };
class NonPositive : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class CriticalExponent : public Error { public: using Error::Error; };

// Cell with a vanishing classification integrand; carries the offending node.
class SingularCell : public Error {
public:
  SingularCell(const std::string& what, std::size_t index)
      : Error(what), index(index) {}
  std::size_t index;
};

// ---------------------------------------------------------------------------
// Monotone side of f'(s)F(s) relative to its limit A
// ---------------------------------------------------------------------------

// Constant means the product sits at A identically (both one-sided
// inequalities hold); Mixed means it crosses A arbitrarily far out.
enum class Side { Below, Above, Constant, Mixed, Unknown };

inline bool side_allows_below(Side s) { return s == Side::Below || s == Side::Constant; }
inline bool side_allows_above(Side s) { return s == Side::Above || s == Side::Constant; }

inline const char* to_string(Side s) {
  switch (s) {
    case Side::Below: return "below";
    case Side::Above: return "above";
    case Side::Constant: return "constant";
    case Side::Mixed: return "mixed";
    case Side::Unknown: return "unknown";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Small numeric helpers
// ---------------------------------------------------------------------------

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.7724538509055160273;

inline double rel_diff(double a, double b) {
  double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// Geometric grid s0 * ratio^k, k = 0..count-1.
inline std::vector<double> geometric_grid(double s0, double ratio, int count) {
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(count));
  double s = s0;
  for (int k = 0; k < count; ++k) {
    g.push_back(s);
    s *= ratio;
  }
  return g;
}

// Logarithmically spaced grid with `count` points from a to b inclusive.
inline std::vector<double> log_grid(double a, double b, int count) {
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    g.push_back(a);
    return g;
  }
  double la = std::log(a), lb = std::log(b);
  for (int k = 0; k < count; ++k)
    g.push_back(std::exp(la + (lb - la) * k / (count - 1)));
  return g;
}

// Least squares fit y = a + b*x; returns {a, b}.
inline std::pair<double, double> linear_fit(const std::vector<double>& x,
                                            const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error("linear_fit: need at least two samples");
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) throw Error("linear_fit: degenerate abscissae");
  double b = (n * sxy - sx * sy) / denom;
  double a = (sy - b * sx) / n;
  return {a, b};
}

}  // namespace superheat
