#pragma once

#include <cmath>
#include <vector>

#include "superheat/common.hpp"
#include "superheat/grid.hpp"
#include "superheat/nonlinearity.hpp"

namespace superheat {

// Parameters of a uniformly local L^p norm: exponent and ball radius.
struct UlocParams {
  double p = 1.0;  // >= 1, or infinity()
  double rho = 1.0;

  static double infinity() { return std::numeric_limits<double>::infinity(); }
};

namespace detail {

// Integer offsets whose cell centers lie inside the ball of radius rho.
inline std::vector<std::array<int, 3>> ball_offsets(int dim, double spacing,
                                                    double rho) {
  int R = static_cast<int>(std::floor(rho / spacing + 1e-12));
  std::vector<std::array<int, 3>> out;
  double r2 = (rho / spacing) * (rho / spacing) * (1 + 1e-12);
  int R1 = dim >= 2 ? R : 0;
  int R2 = dim >= 3 ? R : 0;
  for (int i = -R; i <= R; ++i)
    for (int j = -R1; j <= R1; ++j)
      for (int k = -R2; k <= R2; ++k)
        if (i * i + j * j + k * k <= r2) out.push_back({i, j, k});
  return out;
}

}  // namespace detail

// Number of grid cells whose centers fall in a radius-rho ball around a node.
inline std::size_t ball_cell_count(const GridField& u, double rho) {
  return detail::ball_offsets(u.dim(), u.spacing(), rho).size();
}

// Discrete ball volume: (#cells) * h^N.
inline double discrete_ball_volume(const GridField& u, double rho) {
  return static_cast<double>(ball_cell_count(u, rho)) * u.cell_volume();
}

// sup over grid-node centers y of ( sum_{x in B_rho(y)} |u(x)|^p h^N )^{1/p};
// max |u| over the box for p = infinity. Ball membership is by cell-center
// inclusion; centers range over every node of the box.
inline double uloc_norm(const GridField& u, const UlocParams& params) {
  if (std::isinf(params.p)) return u.max_abs();
  if (!(params.p >= 1)) throw ConfigError("uloc_norm: p must be >= 1");
  if (params.rho < u.spacing() / 2)
    throw EmptyBall("uloc_norm: rho below half a cell");
  const auto offsets = detail::ball_offsets(u.dim(), u.spacing(), params.rho);
  const double hN = u.cell_volume();
  const auto& ext = u.extents();
  double best = 0;
  for (int i0 = 0; i0 < ext[0]; ++i0)
    for (int i1 = 0; i1 < ext[1]; ++i1)
      for (int i2 = 0; i2 < ext[2]; ++i2) {
        double acc = 0;
        for (const auto& o : offsets) {
          double v = u.value_extended({i0 + o[0], i1 + o[1], i2 + o[2]});
          acc += std::pow(std::abs(v), params.p);
        }
        best = std::max(best, acc);
      }
  return std::pow(best * hN, 1.0 / params.p);
}

// Plain box integral sum |u| h^N (used by trend studies and tests).
inline double box_integral_abs(const GridField& u) {
  double acc = 0;
  for (double v : u.values()) acc += std::abs(v);
  return acc * u.cell_volume();
}

// || F(u0)^{-r} ||_{L^1_ul,rho}. A cell where F(u0) = +inf (data at the
// level where 1/f is non-integrable) contributes 0; a cell where F(u0)
// underflows to zero is the numerical signature of non-integrable data and
// is reported as SingularCell with its location.
inline GridField classification_integrand(const GridField& u0,
                                          const Nonlinearity& nl, double r) {
  GridField g = u0;
  const double floor_cap =
      nl.kind() == NonlinearityKind::Custom && std::isinf(nl.F0())
          ? [&] {
              double smallest = std::numeric_limits<double>::infinity();
              for (double v : u0.values())
                if (v > 0) smallest = std::min(smallest, v);
              return std::isfinite(smallest) ? smallest * 1e-6 : 1e-12;
            }()
          : 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = u0.values()[i];
    if (s < 0) throw OutOfRange("classification integrand: negative data");
    if (nl.kind() == NonlinearityKind::Custom && s < nl.table_min())
      s = std::max(s, floor_cap > 0 ? floor_cap : nl.table_min());
    double F = nl.F(s);
    if (std::isinf(F)) {
      g.values()[i] = 0.0;
      continue;
    }
    if (F <= 0)
      throw SingularCell("classification integrand: F underflowed to 0", i);
    g.values()[i] = std::pow(F, -r);
  }
  if (!g.boundary().periodic_p()) {
    double b = g.boundary().value;
    double Fb = nl.F(std::max(b, 0.0));
    g.set_boundary(BoundarySpec::constant(
        std::isinf(Fb) ? 0.0 : std::pow(Fb, -r)));
  }
  return g;
}

inline double classification_integral(const GridField& u0,
                                      const Nonlinearity& nl, double r,
                                      double rho) {
  GridField g = classification_integrand(u0, nl, r);
  return uloc_norm(g, UlocParams{1.0, rho});
}

// ---------------------------------------------------------------------------
// refinement trends
// ---------------------------------------------------------------------------

struct Trend {
  enum class Kind { Converging, Diverging };
  Kind kind = Kind::Converging;
  double limit = 0;  // meaningful when converging
  double rate = 0;   // fitted growth exponent in 1/h when diverging
};

// Decides between convergence and divergence of integral values under mesh
// refinement. Input pairs (h, value) with h halving between levels.
inline Trend refine_trend(std::vector<std::pair<double, double>> levels,
                          double diverge_exponent_threshold = 0.1) {
  if (levels.size() < 3)
    throw InsufficientLevels("refine_trend: need at least 3 levels");
  std::sort(levels.begin(), levels.end(),
            [](auto& a, auto& b) { return a.first > b.first; });
  for (std::size_t i = 1; i < levels.size(); ++i) {
    double ratio = levels[i].first / levels[i - 1].first;
    if (std::abs(ratio - 0.5) > 0.05)
      throw InsufficientLevels("refine_trend: levels must halve h");
  }
  std::vector<double> lx, ly;
  for (auto& [h, v] : levels) {
    lx.push_back(std::log(1.0 / h));
    ly.push_back(std::log(std::max(std::abs(v), 1e-300)));
  }
  auto [a, b] = linear_fit(lx, ly);
  (void)a;

  Trend t;
  const std::size_t n = levels.size();
  double d_last = levels[n - 1].second - levels[n - 2].second;
  double d_prev = levels[n - 2].second - levels[n - 3].second;
  bool increments_growing_linearly =
      d_prev > 0 && d_last > 0.8 * d_prev &&
      d_last > 0.05 * std::abs(levels[n - 1].second) + 1e-300;
  if (b > diverge_exponent_threshold ||
      (increments_growing_linearly && b > 0.02)) {
    t.kind = Trend::Kind::Diverging;
    t.rate = b;
    return t;
  }
  t.kind = Trend::Kind::Converging;
  double theta = (d_prev != 0) ? d_last / d_prev : 0.0;
  if (theta > 0 && theta < 0.95) {
    t.limit = levels[n - 1].second + d_last * theta / (1 - theta);
  } else {
    t.limit = levels[n - 1].second;
  }
  t.rate = b;
  return t;
}

}  // namespace superheat
