#include "catch_amalgamated.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "superheat/grid.hpp"
#include "superheat/uloc.hpp"

using namespace superheat;

namespace {

GridField line_field(int n, double length, BoundarySpec b,
                     std::function<double(double)> fn, double x0 = 0.0) {
  GridField g(1, {x0, 0, 0}, length / n, {n, 1, 1}, b);
  g.fill([&](std::array<double, 3> x) { return fn(x[0]); });
  return g;
}

// Independent brute-force oracle for the uniformly local norm: loops over
// all (center, cell) pairs by coordinates.
double uloc_brute(const GridField& u, double p, double rho) {
  double best = 0;
  double hN = u.cell_volume();
  for (std::size_t c = 0; c < u.size(); ++c) {
    auto ci = u.unflatten(c);
    double acc = 0;
    int R = static_cast<int>(rho / u.spacing()) + 1;
    int R1 = u.dim() >= 2 ? R : 0;
    for (int i = ci[0] - R; i <= ci[0] + R; ++i)
      for (int j = ci[1] - R1; j <= ci[1] + R1; ++j) {
        double dx = (i - ci[0]) * u.spacing();
        double dy = (j - ci[1]) * u.spacing();
        if (dx * dx + dy * dy > rho * rho * (1 + 1e-12)) continue;
        acc += std::pow(std::abs(u.value_extended({i, j, ci[2]})), p);
      }
    best = std::max(best, acc);
  }
  return std::pow(best * hN, 1.0 / p);
}

GridField random_field(int n, unsigned seed, BoundarySpec b) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  GridField g(1, {0, 0, 0}, 1.0 / n, {n, 1, 1}, b);
  for (double& v : g.values()) v = U(rng);
  return g;
}

}  // namespace

TEST_CASE("uloc norm of constants and indicators") {
  // constant field: every ball holds the same mass
  auto c = line_field(128, 4.0, BoundarySpec::periodic(),
                      [](double) { return 0.7; });
  double rho = 0.5;
  double val = uloc_norm(c, {1.0, rho});
  CHECK(std::abs(val - 0.7 * 2 * rho) <= 0.7 * c.cell_volume() * 1.01);

  // indicator of [0, 0.25) on the periodic unit box with rho = 0.25: the
  // winning ball covers the support entirely
  auto ind = line_field(256, 1.0, BoundarySpec::periodic(),
                        [](double x) { return x < 0.25 ? 1.0 : 0.0; });
  double v2 = uloc_norm(ind, {1.0, 0.25});
  CHECK(std::abs(v2 - 0.25) <= 2 * ind.cell_volume());
  CHECK(v2 == Catch::Approx(uloc_brute(ind, 1.0, 0.25)).epsilon(1e-13));

  // p = infinity is the plain max
  CHECK(uloc_norm(ind, {UlocParams::infinity(), 0.25}) == 1.0);
}

TEST_CASE("uloc norm against the brute oracle on random fields") {
  for (unsigned seed : {1u, 2u, 3u}) {
    auto u = random_field(64, seed, BoundarySpec::periodic());
    for (double p : {1.0, 2.0}) {
      for (double rho : {0.05, 0.2}) {
        CHECK(uloc_norm(u, {p, rho}) ==
              Catch::Approx(uloc_brute(u, p, rho)).epsilon(1e-12));
      }
    }
    auto v = random_field(64, seed + 10, BoundarySpec::constant(0.0));
    CHECK(uloc_norm(v, {1.0, 0.1}) ==
          Catch::Approx(uloc_brute(v, 1.0, 0.1)).epsilon(1e-12));
  }

  // 2D check
  GridField g2(2, {0, 0, 0}, 1.0 / 24, {24, 24, 1}, BoundarySpec::periodic());
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (double& v : g2.values()) v = U(rng);
  CHECK(uloc_norm(g2, {1.0, 0.2}) ==
        Catch::Approx(uloc_brute(g2, 1.0, 0.2)).epsilon(1e-12));
}

TEST_CASE("uloc norm axioms") {
  auto u = random_field(96, 5, BoundarySpec::periodic());
  auto w = random_field(96, 6, BoundarySpec::periodic());
  UlocParams par{2.0, 0.15};

  // absolute homogeneity
  GridField su = u;
  for (double& v : su.values()) v *= -3.5;
  CHECK(uloc_norm(su, par) ==
        Catch::Approx(3.5 * uloc_norm(u, par)).epsilon(1e-13));

  // triangle inequality
  GridField sum = u;
  for (std::size_t i = 0; i < sum.size(); ++i) sum.values()[i] += w.values()[i];
  CHECK(uloc_norm(sum, par) <=
        uloc_norm(u, par) + uloc_norm(w, par) + 1e-12);

  // nondecreasing in rho for nonnegative data at p = 1
  double prev = 0;
  for (double rho : {0.05, 0.1, 0.2, 0.4}) {
    double v = uloc_norm(u, {1.0, rho});
    CHECK(v >= prev - 1e-14);
    prev = v;
  }

  // field supported in a single ball: uloc L1 equals the plain integral
  auto bump = line_field(128, 1.0, BoundarySpec::periodic(), [](double x) {
    return std::abs(x - 0.5) < 0.1 ? 1.0 + x : 0.0;
  });
  CHECK(uloc_norm(bump, {1.0, 0.3}) ==
        Catch::Approx(box_integral_abs(bump)).epsilon(1e-13));

  // discrete Hoelder consistency
  for (double p : {2.0, 3.0}) {
    double lhs = uloc_norm(u, {1.0, 0.15});
    double vol = discrete_ball_volume(u, 0.15);
    double rhs = std::pow(vol, 1 - 1.0 / p) * uloc_norm(u, {p, 0.15});
    CHECK(lhs <= rhs * (1 + 1e-12));
  }

  CHECK_THROWS_AS(uloc_norm(u, {1.0, u.spacing() / 4}), EmptyBall);
}

TEST_CASE("classification integral closed forms") {
  auto p2 = Nonlinearity::power(2);
  double rho = 0.25;
  for (double s : {0.5, 2.0}) {
    auto u = line_field(256, 2.0, BoundarySpec::periodic(),
                        [&](double) { return s; });
    for (double r : {1.0, 2.0}) {
      // F(u) = 1/u, so the integrand is s^r
      double expect = std::pow(s, r) * discrete_ball_volume(u, rho);
      CHECK(classification_integral(u, p2, r, rho) ==
            Catch::Approx(expect).epsilon(1e-12));
    }
  }

  // u0 = 0 with a power source: F(0) = inf, integrand 0
  auto z = line_field(64, 1.0, BoundarySpec::periodic(),
                      [](double) { return 0.0; });
  CHECK(classification_integral(z, p2, 1.5, rho) == 0.0);

  // u0 = 0 with the exponential source: F(0) = 1, integrand 1
  auto ex = Nonlinearity::exponential();
  CHECK(classification_integral(z, ex, 2.0, rho) ==
        Catch::Approx(discrete_ball_volume(z, rho)).epsilon(1e-12));
}

TEST_CASE("classification integral for expsq sits in the equivalence band") {
  // for data >= 1, F^{-r} is sandwiched between (2 s e^{s^2})^r and
  // (4 s e^{s^2})^r, so the integral lands between the direct integrals
  auto es = Nonlinearity::exp_square();
  auto u = line_field(256, 2.0, BoundarySpec::periodic(), [](double x) {
    double t = std::cos(kPi * (x - 1.0));
    return 1.0 + 1.5 * t * t;
  });
  double rho = 0.25;
  for (double r : {0.7, 1.5}) {
    GridField direct = map_field(
        u, [&](double s) { return std::pow(s, r) * std::exp(r * s * s); });
    double base = uloc_norm(direct, {1.0, rho});
    double got = classification_integral(u, es, r, rho);
    CHECK(got >= std::pow(2.0, r) * base * 0.999);
    CHECK(got <= std::pow(4.0, r) * base * 1.001);
  }
}

TEST_CASE("singular cell detection") {
  auto es = Nonlinearity::exp_square();
  auto u = line_field(32, 1.0, BoundarySpec::periodic(),
                      [](double x) { return x < 0.1 ? 40.0 : 1.0; });
  // F(40) underflows: e^{-1600} is far below the double floor
  CHECK_THROWS_AS(classification_integral(u, es, 1.0, 0.2), SingularCell);
}

TEST_CASE("refinement trends") {
  // Cauchy sequence of values
  Trend t = refine_trend({{0.1, 1.0}, {0.05, 1.01}, {0.025, 1.012}});
  CHECK(t.kind == Trend::Kind::Converging);
  CHECK(t.limit == Catch::Approx(1.012).margin(2e-3));

  // constant values
  Trend c = refine_trend({{0.1, 5.0}, {0.05, 5.0}, {0.025, 5.0}});
  CHECK(c.kind == Trend::Kind::Converging);
  CHECK(c.limit == Catch::Approx(5.0));

  // |x|^{-a} data with the power(2) source at r = 1: integrand |x|^{-a};
  // Riemann sums grow like h^{1-a} for a > 1
  auto p2 = Nonlinearity::power(2);
  for (double a : {1.5, 2.0}) {
    std::vector<std::pair<double, double>> levels;
    for (int n : {256, 512, 1024}) {
      auto u = line_field(n, 1.0, BoundarySpec::periodic(), [&](double x) {
        double d = std::max(std::abs(x - 0.5), 0.5 / n);
        return std::pow(d, -a);
      });
      levels.push_back({u.spacing(), classification_integral(u, p2, 1.0, 0.2)});
    }
    Trend d = refine_trend(levels);
    CHECK(d.kind == Trend::Kind::Diverging);
    CHECK(d.rate == Catch::Approx(a - 1).margin(0.25));
  }

  CHECK_THROWS_AS(refine_trend({{0.1, 1.0}, {0.05, 1.0}}), InsufficientLevels);
  CHECK_THROWS_AS(refine_trend({{0.1, 1.0}, {0.07, 1.0}, {0.05, 1.0}}),
                  InsufficientLevels);
}

TEST_CASE("gridfield io round trip is bit exact") {
  auto u = random_field(97, 42, BoundarySpec::constant(0.25));
  for (bool binary : {true, false}) {
    std::string path = std::string("/tmp/sh_gf_") +
                       (binary ? "bin" : "csv") + ".gf";
    u.save(path, binary);
    GridField v = GridField::load(path);
    REQUIRE(v.same_geometry(u));
    CHECK(v.boundary().kind == u.boundary().kind);
    CHECK(v.boundary().value == u.boundary().value);
    bool all_equal = true;
    for (std::size_t i = 0; i < u.size(); ++i)
      all_equal = all_equal && v.values()[i] == u.values()[i];
    CHECK(all_equal);  // exact reload, including the csv payload
    std::remove(path.c_str());
  }
}

TEST_CASE("sampling and decimation") {
  auto u = line_field(64, 1.0, BoundarySpec::periodic(),
                      [](double x) { return std::sin(2 * kPi * x); });
  // linear interpolation at off-node points is second-order accurate
  for (double x : {0.1234, 0.5017, 0.951}) {
    CHECK(u.sample({x, 0, 0}) ==
          Catch::Approx(std::sin(2 * kPi * x)).margin(2e-3));
  }
  // periodic wrap
  CHECK(u.sample({1.25, 0, 0}) == Catch::Approx(u.sample({0.25, 0, 0})));

  auto d = u.decimate();
  CHECK(d.extents()[0] == 32);
  CHECK(d.spacing() == Catch::Approx(2 * u.spacing()));
  CHECK(d.values()[3] == u.values()[6]);

  // constant extension sampling outside the box
  auto v = line_field(16, 1.0, BoundarySpec::constant(7.0),
                      [](double) { return 1.0; });
  CHECK(v.sample({2.5, 0, 0}) == 7.0);
}
