#pragma once

#include <cmath>
#include <vector>

#include "superheat/common.hpp"

namespace superheat {

// Monotone cubic (Fritsch-Carlson) interpolant. Knots must be strictly
// increasing. Evaluation outside the knot range extends linearly with the
// boundary slope, which in log-log coordinates is a power-law extension.
class MonotoneCubic {
public:
  MonotoneCubic() = default;

  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw Error("MonotoneCubic: need >= 2 matching knots");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1]))
        throw Error("MonotoneCubic: knots must be strictly increasing");
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
      d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    m_.assign(n, 0.0);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (d[i - 1] * d[i] <= 0) {
        m_[i] = 0.0;
      } else {
        m_[i] = 0.5 * (d[i - 1] + d[i]);
      }
    }
    // Fritsch-Carlson limiter
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (d[i] == 0) {
        m_[i] = m_[i + 1] = 0.0;
        continue;
      }
      double a = m_[i] / d[i], b = m_[i + 1] / d[i];
      double s = a * a + b * b;
      if (s > 9.0) {
        double t = 3.0 / std::sqrt(s);
        m_[i] = t * a * d[i];
        m_[i + 1] = t * b * d[i];
      }
    }
  }

  double operator()(double x) const {
    const std::size_t n = x_.size();
    if (x <= x_.front()) return y_.front() + m_.front() * (x - x_.front());
    if (x >= x_.back()) return y_.back() + m_.back() * (x - x_.back());
    std::size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (x_[mid] <= x) lo = mid; else hi = mid;
    }
    double h = x_[hi] - x_[lo];
    double t = (x - x_[lo]) / h;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    return h00 * y_[lo] + h10 * h * m_[lo] + h01 * y_[hi] + h11 * h * m_[hi];
  }

  double xmin() const { return x_.front(); }
  double xmax() const { return x_.back(); }
  double slope_left() const { return m_.front(); }
  double slope_right() const { return m_.back(); }

private:
  std::vector<double> x_, y_, m_;
};

}  // namespace superheat
