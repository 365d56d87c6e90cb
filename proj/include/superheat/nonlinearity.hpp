#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "superheat/common.hpp"
#include "superheat/interp.hpp"
#include "superheat/quadrature.hpp"
#include "superheat/rootfind.hpp"
#include "superheat/special_functions.hpp"

namespace superheat {

enum class NonlinearityKind { Power, PowerSum, Exponential, ExpSquare, Custom };

// Sampled description of a user-supplied source term. Values interpolate in
// log-log with a monotone cubic; f' must be supplied, it is never obtained by
// differentiating the f samples.
struct CustomTable {
  std::vector<double> s, f, fprime;
};

inline CustomTable load_custom_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open custom nonlinearity table: " + path);
  CustomTable t;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ls(line);
    double s, f, fp;
    if (ls >> s >> f >> fp) {
      t.s.push_back(s);
      t.f.push_back(f);
      t.fprime.push_back(fp);
    }
  }
  return t;
}

class Nonlinearity;
struct AEstimate {
  double A = 1.0;
  Side side = Side::Unknown;
  double s_threshold = 0.0;
  bool exact = false;             // closed form used for the limit
  bool short_circuited = false;   // f'F numerically constant
  bool heuristic_side = true;     // side detection is a finite-grid heuristic
  std::vector<double> s_samples;
  std::vector<double> fprimeF_samples;
};

AEstimate estimate_A(const Nonlinearity& nl, const std::vector<double>& s_grid);
std::vector<double> default_a_grid(const Nonlinearity& nl);

// A positive increasing source term f with its structure function
//   F(s) = integral_s^inf du / f(u)
// and the resolved metadata (limit A of f'F, monotone side, threshold).
class Nonlinearity {
public:
  static Nonlinearity power(double p) {
    if (!(p > 1)) throw ConfigError("power(p) requires p > 1");
    Nonlinearity nl;
    nl.kind_ = NonlinearityKind::Power;
    nl.p_ = p;
    nl.finish_();
    return nl;
  }

  static Nonlinearity power_sum(double p, double q) {
    if (!(p > q && q > 1)) throw ConfigError("powersum(p,q) requires p > q > 1");
    Nonlinearity nl;
    nl.kind_ = NonlinearityKind::PowerSum;
    nl.p_ = p;
    nl.q_ = q;
    // series cutoff: s >= series_floor_ makes s^{q-p} <= 1e-5
    nl.series_floor_ = std::pow(1e5, 1.0 / (p - q));
    nl.finish_();
    return nl;
  }

  static Nonlinearity exponential() {
    Nonlinearity nl;
    nl.kind_ = NonlinearityKind::Exponential;
    nl.finish_();
    return nl;
  }

  static Nonlinearity exp_square() {
    Nonlinearity nl;
    nl.kind_ = NonlinearityKind::ExpSquare;
    nl.finish_();
    return nl;
  }

  static Nonlinearity custom(const CustomTable& table, double domain_floor = 0.0) {
    if (table.s.size() < 4)
      throw ConfigError("custom nonlinearity needs at least 4 samples");
    Nonlinearity nl;
    nl.kind_ = NonlinearityKind::Custom;
    nl.floor_ = domain_floor;
    std::vector<double> ls, lf, lfp;
    for (std::size_t i = 0; i < table.s.size(); ++i) {
      if (!(table.s[i] > 0)) throw ConfigError("custom table: s must be > 0");
      if (!(table.f[i] > 0))
        throw NonPositiveSource("custom table: f must be > 0");
      if (!(table.fprime[i] > 0))
        throw NonPositiveSource("custom table: f' must be > 0");
      if (i > 0 && !(table.f[i] > table.f[i - 1]))
        throw NonPositiveSource("custom table: f must be increasing");
      ls.push_back(std::log(table.s[i]));
      lf.push_back(std::log(table.f[i]));
      lfp.push_back(std::log(table.fprime[i]));
    }
    nl.logf_ = MonotoneCubic(ls, lf);
    nl.logfp_ = MonotoneCubic(ls, lfp);
    nl.table_smin_ = table.s.front();
    nl.table_smax_ = table.s.back();
    // right-tail laws for the improper integral:
    //   power law  f ~ c s^beta   (beta = log-log slope)
    //   exp law    f ~ c e^{kappa s}
    nl.beta_right_ = nl.logf_.slope_right();
    std::size_t n = table.s.size();
    nl.kappa_right_ = (lf[n - 1] - lf[n - 2]) / (table.s[n - 1] - table.s[n - 2]);
    nl.tail_exponential_ = nl.pick_tail_model_(table);
    nl.beta_left_ = nl.logf_.slope_left();
    nl.finish_();
    return nl;
  }

  // Accepts "power(p)", "powersum(p,q)", "exp", "expsq".
  static Nonlinearity from_name(const std::string& name) {
    auto args = [&](const std::string& prefix) {
      std::string inner = name.substr(prefix.size());
      if (inner.size() < 2 || inner.front() != '(' || inner.back() != ')')
        throw ConfigError("bad nonlinearity spec: " + name);
      inner = inner.substr(1, inner.size() - 2);
      std::vector<double> vals;
      std::istringstream ss(inner);
      std::string tok;
      while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
      return vals;
    };
    if (name == "exp") return exponential();
    if (name == "expsq") return exp_square();
    if (name.rfind("powersum", 0) == 0) {
      auto v = args("powersum");
      if (v.size() != 2) throw ConfigError("powersum needs (p,q)");
      return power_sum(v[0], v[1]);
    }
    if (name.rfind("power", 0) == 0) {
      auto v = args("power");
      if (v.size() != 1) throw ConfigError("power needs (p)");
      return power(v[0]);
    }
    throw ConfigError("unknown nonlinearity: " + name);
  }

  NonlinearityKind kind() const { return kind_; }
  double p_exponent() const { return p_; }
  double q_exponent() const { return q_; }
  double domain_floor() const { return floor_; }

  std::string name() const {
    std::ostringstream os;
    switch (kind_) {
      case NonlinearityKind::Power: os << "power(" << p_ << ")"; break;
      case NonlinearityKind::PowerSum: os << "powersum(" << p_ << "," << q_ << ")"; break;
      case NonlinearityKind::Exponential: os << "exp"; break;
      case NonlinearityKind::ExpSquare: os << "expsq"; break;
      case NonlinearityKind::Custom: os << "custom"; break;
    }
    return os.str();
  }

  double f(double s) const {
    switch (kind_) {
      case NonlinearityKind::Power: return std::pow(s, p_);
      case NonlinearityKind::PowerSum: return std::pow(s, p_) + std::pow(s, q_);
      case NonlinearityKind::Exponential: return std::exp(s);
      case NonlinearityKind::ExpSquare: return std::exp(s * s);
      case NonlinearityKind::Custom: return std::exp(logf_(std::log(s)));
    }
    return 0;
  }

  double fprime(double s) const {
    switch (kind_) {
      case NonlinearityKind::Power: return p_ * std::pow(s, p_ - 1);
      case NonlinearityKind::PowerSum:
        return p_ * std::pow(s, p_ - 1) + q_ * std::pow(s, q_ - 1);
      case NonlinearityKind::Exponential: return std::exp(s);
      case NonlinearityKind::ExpSquare: return 2 * s * std::exp(s * s);
      case NonlinearityKind::Custom: return std::exp(logfp_(std::log(s)));
    }
    return 0;
  }

  // F(0+); +inf when 1/f is not integrable at 0.
  double F0() const {
    switch (kind_) {
      case NonlinearityKind::Power:
      case NonlinearityKind::PowerSum:
        return std::numeric_limits<double>::infinity();
      case NonlinearityKind::Exponential: return 1.0;
      case NonlinearityKind::ExpSquare: return kSqrtPi / 2.0;
      case NonlinearityKind::Custom: {
        if (beta_left_ >= 1.0) return std::numeric_limits<double>::infinity();
        double head = integrate_adaptive(
            [&](double u) { return 1.0 / f(std::max(u, 1e-300)); }, 0.0,
            table_smin_, 1e-10);
        return head + F(table_smin_);
      }
    }
    return 0;
  }

  // Structure function F(s) = integral_s^inf du/f(u).
  double F(double s) const {
    if (!(s >= floor_)) throw OutOfRange("eval_F: s below domain floor");
    switch (kind_) {
      case NonlinearityKind::Power:
        if (s == 0) return std::numeric_limits<double>::infinity();
        return std::pow(s, 1 - p_) / (p_ - 1);
      case NonlinearityKind::PowerSum: {
        if (s == 0) return std::numeric_limits<double>::infinity();
        if (s >= series_floor_) return powersum_series_(s);
        double partial = integrate_adaptive(
            [&](double u) { return 1.0 / (std::pow(u, p_) + std::pow(u, q_)); },
            s, series_floor_, 1e-13);
        return partial + powersum_series_(series_floor_);
      }
      case NonlinearityKind::Exponential: return std::exp(-s);
      case NonlinearityKind::ExpSquare: return (kSqrtPi / 2.0) * erfc_pos(s);
      case NonlinearityKind::Custom: return custom_F_(s);
    }
    return 0;
  }

  // log F(s); stable for exponential-type tails far past double underflow.
  double F_log(double s) const {
    switch (kind_) {
      case NonlinearityKind::Power:
        return (1 - p_) * std::log(s) - std::log(p_ - 1);
      case NonlinearityKind::Exponential: return -s;
      case NonlinearityKind::ExpSquare:
        if (s < 1.2) return std::log(F(s));
        return -s * s + std::log((kSqrtPi / 2.0) * erfcx(s));
      default: {
        double v = F(s);
        if (v == 0)
          throw OutOfRange("F_log: F underflows and no stable path exists");
        return std::log(v);
      }
    }
  }

  // Inverse of F. Accepts y in (0, F(0+)]; y = +inf maps to the domain floor
  // when F(0+) = +inf.
  double F_inv(double y) const {
    if (std::isinf(y)) {
      if (std::isinf(F0())) return floor_;
      throw OutOfRange("eval_F_inv: y exceeds F(0+)");
    }
    if (!(y > 0)) throw OutOfRange("eval_F_inv: y must be > 0");
    switch (kind_) {
      case NonlinearityKind::Power:
        return std::pow((p_ - 1) * y, -1.0 / (p_ - 1));
      case NonlinearityKind::Exponential:
        if (y > 1.0 + 1e-12) throw OutOfRange("eval_F_inv: y > F(0) = 1");
        return std::max(0.0, -std::log(y));
      default: break;
    }
    double f0 = F0();
    if (!std::isinf(f0)) {
      if (y > f0 * (1 + 1e-12)) throw OutOfRange("eval_F_inv: y > F(0+)");
      if (y >= f0) return floor_;
    }
    auto g = [&](double s) { return F(s) - y; };
    return solve_decreasing(g, 1.0, floor_);
  }

  // Inverse of F from log y; the stable route for tiny y.
  double F_inv_log(double log_y) const {
    switch (kind_) {
      case NonlinearityKind::Power:
        return std::exp(-(log_y + std::log(p_ - 1)) / (p_ - 1));
      case NonlinearityKind::Exponential:
        if (log_y > 1e-12) throw OutOfRange("F_inv_log: y > F(0) = 1");
        return std::max(0.0, -log_y);
      case NonlinearityKind::ExpSquare: {
        if (log_y > std::log(kSqrtPi / 2.0) + 1e-12)
          throw OutOfRange("F_inv_log: y > F(0+)");
        if (log_y >= std::log(kSqrtPi / 2.0)) return 0.0;
        auto g = [&](double s) { return F_log(s) - log_y; };
        return solve_decreasing(g, 1.0, 0.0);
      }
      default:
        return F_inv(std::exp(log_y));
    }
  }

  // f'(s) F(s), computed on a path that cannot overflow for the built-ins.
  double fprimeF(double s) const {
    switch (kind_) {
      case NonlinearityKind::Power: return p_ / (p_ - 1);
      case NonlinearityKind::PowerSum: {
        if (s >= series_floor_) {
          // (p + q s^{q-p}) * sum_m (-1)^m s^{-m(p-q)} / (p-1+m(p-q))
          double x = std::pow(s, q_ - p_);
          double sum = 0, xm = 1, sign = 1;
          for (int m = 0; m < 60; ++m) {
            double term = sign * xm / (p_ - 1 + m * (p_ - q_));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
            xm *= x;
            sign = -sign;
          }
          return (p_ + q_ * x) * sum;
        }
        return fprime(s) * F(s);
      }
      case NonlinearityKind::Exponential: return 1.0;
      case NonlinearityKind::ExpSquare: return kSqrtPi * s * erfcx(s);
      case NonlinearityKind::Custom: return fprime(s) * F(s);
    }
    return 0;
  }

  double A() const { return A_; }
  bool A_exact() const { return A_exact_; }
  Side side() const { return side_; }
  double s_threshold() const { return s_thr_; }

  // table range, meaningful for Custom only
  double table_min() const { return table_smin_; }
  double table_max() const { return table_smax_; }

private:
  Nonlinearity() = default;

  bool pick_tail_model_(const CustomTable& t) {
    // residuals of the last up-to-4 samples against both laws
    std::size_t n = t.s.size();
    std::size_t k = std::min<std::size_t>(4, n);
    std::vector<double> ls, s, lf;
    for (std::size_t i = n - k; i < n; ++i) {
      ls.push_back(std::log(t.s[i]));
      s.push_back(t.s[i]);
      lf.push_back(std::log(t.f[i]));
    }
    auto rss = [&](const std::vector<double>& x) {
      auto [a, b] = linear_fit(x, lf);
      double r = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        double e = lf[i] - (a + b * x[i]);
        r += e * e;
      }
      return r;
    };
    return rss(s) < rss(ls);
  }

  // Truncated alternating series for F of s^p + s^q, valid for large s:
  //   F(s) = sum_{m>=0} (-1)^m s^{1-p-m(p-q)} / (p-1+m(p-q))
  double powersum_series_(double s) const {
    double x = std::pow(s, q_ - p_);
    double lead = std::pow(s, 1 - p_);
    double sum = 0, xm = 1, sign = 1;
    for (int m = 0; m < 60; ++m) {
      double term = sign * xm / (p_ - 1 + m * (p_ - q_));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      xm *= x;
      sign = -sign;
    }
    return lead * sum;
  }

  double custom_F_(double s) const {
    // integrate over the sampled range, then attach a fitted-law tail and
    // extend the cutoff until the tail is negligible
    double S = std::max(2 * s, table_smax_);
    auto inv_f = [&](double u) { return 1.0 / f(u); };
    auto tail_at = [&](double S_) {
      double fS = f(S_);
      if (tail_exponential_) {
        if (kappa_right_ <= 0)
          throw TailDivergence("custom tail: non-increasing exponent");
        return 1.0 / (kappa_right_ * fS);
      }
      if (beta_right_ <= 1.0 + 1e-9)
        throw TailDivergence(
            "custom tail: power exponent <= 1, integral diverges");
      return S_ / ((beta_right_ - 1.0) * fS);
    };
    double partial = integrate_adaptive(inv_f, s, S, 1e-11);
    double tail = tail_at(S);
    for (int i = 0; i < 60 && tail > 1e-12 * std::max(partial, 1e-300); ++i) {
      double S2 = S * 2;
      partial += integrate_adaptive(inv_f, S, S2, 1e-11);
      S = S2;
      tail = tail_at(S);
    }
    return partial + tail;
  }

  void finish_();

  NonlinearityKind kind_ = NonlinearityKind::Power;
  double p_ = 2, q_ = 0;
  double floor_ = 0.0;
  double series_floor_ = 0.0;

  MonotoneCubic logf_, logfp_;
  double table_smin_ = 0, table_smax_ = 0;
  double beta_left_ = 0, beta_right_ = 0, kappa_right_ = 0;
  bool tail_exponential_ = false;

  double A_ = 1.0;
  Side side_ = Side::Unknown;
  double s_thr_ = 0.0;
  bool A_exact_ = false;
};

inline std::vector<double> default_a_grid(const Nonlinearity& nl) {
  double lo = std::max(nl.domain_floor() * 2, std::pow(2.0, -6));
  double hi = std::pow(2.0, 40);
  if (nl.kind() == NonlinearityKind::PowerSum) {
    // the tail of f'F decays like s^{-(p-q)}; reach the 1e-8 scale so the
    // closed-form verification has something convergent to look at
    double gap = nl.p_exponent() - nl.q_exponent();
    hi = std::min(1e250, std::max(hi, std::pow(10.0, 8.0 / gap)));
  }
  if (nl.kind() == NonlinearityKind::Custom) {
    // stay clear of the right table edge, where F leans on the fitted tail
    lo = std::max(lo, nl.table_min());
    hi = std::max(4 * lo, nl.table_max() / 4);
    return log_grid(lo, hi, 24);
  }
  std::vector<double> g;
  for (double s = lo; s <= hi * (1 + 1e-12); s *= 2) g.push_back(s);
  return g;
}

// Richardson-accelerated limit of f'(s)F(s) along a geometric grid, plus
// detection of the monotone side and the threshold where it stabilizes.
inline AEstimate estimate_A(const Nonlinearity& nl,
                            const std::vector<double>& s_grid) {
  if (s_grid.size() < 12)
    throw ConfigError("estimate_A: grid too short");
  for (std::size_t i = 1; i < s_grid.size(); ++i)
    if (!(s_grid[i] > s_grid[i - 1]))
      throw ConfigError("estimate_A: grid must be strictly increasing");
  if (nl.kind() != NonlinearityKind::Custom && s_grid.back() < 1e4)
    throw ConfigError("estimate_A: grid must extend to at least 1e4");

  AEstimate est;
  est.s_samples = s_grid;
  est.fprimeF_samples.reserve(s_grid.size());
  for (double s : s_grid) est.fprimeF_samples.push_back(nl.fprimeF(s));
  const auto& phi = est.fprimeF_samples;
  const std::size_t n = phi.size();

  // Richardson extrapolation assuming phi = A + c s^{-beta}; pick the last
  // triple whose differences sit above the double-precision noise floor.
  auto noise = [&](std::size_t k) {
    return 1e4 * std::numeric_limits<double>::epsilon() * (1 + std::abs(phi[k]));
  };
  std::ptrdiff_t k = -1;
  for (std::size_t i = n - 1; i >= 2; --i) {
    double d1 = phi[i] - phi[i - 1];
    double d0 = phi[i - 1] - phi[i - 2];
    if (std::abs(d1) > noise(i) && std::abs(d0) > noise(i) && d0 * d1 > 0) {
      k = static_cast<std::ptrdiff_t>(i);
      break;
    }
  }
  // raw-tail plateau: used when the differences carry no usable signal;
  // custom tables get the looser tolerance of their interpolation noise
  const double plateau_tol =
      nl.kind() == NonlinearityKind::Custom ? 1e-4 : 1e-6;
  auto plateau_ok = [&] {
    return std::abs(phi[n - 1] - phi[n - 5]) <=
           plateau_tol * (1 + std::abs(phi[n - 1]));
  };
  double A_hat;
  if (k < 0) {
    A_hat = phi.back();
    est.short_circuited = true;
  } else {
    auto rich = [&](std::size_t i) -> std::optional<double> {
      double d1 = phi[i] - phi[i - 1];
      double d0 = phi[i - 1] - phi[i - 2];
      double ratio = d0 / d1;
      if (ratio <= 1.0001) return std::nullopt;
      return phi[i] + d1 / (ratio - 1.0);
    };
    auto A1 = rich(static_cast<std::size_t>(k));
    std::optional<double> A2 =
        k >= 3 ? rich(static_cast<std::size_t>(k - 1)) : std::nullopt;
    if (!A1) {
      if (!plateau_ok())
        throw NonConvergent("estimate_A: tail not algebraically convergent");
      A_hat = phi.back();
      est.short_circuited = true;
    } else if (A2 && std::abs(*A1 - *A2) > 1e-5 * (1 + std::abs(*A1))) {
      if (!plateau_ok())
        throw NonConvergent("estimate_A: successive tail estimates disagree");
      A_hat = phi.back();
      est.short_circuited = true;
    } else {
      A_hat = *A1;
    }
  }

  // built-ins carry the closed-form limit; the numeric estimate must agree
  double A = A_hat;
  switch (nl.kind()) {
    case NonlinearityKind::Power:
    case NonlinearityKind::PowerSum:
      A = nl.p_exponent() / (nl.p_exponent() - 1);
      est.exact = true;
      break;
    case NonlinearityKind::Exponential:
    case NonlinearityKind::ExpSquare:
      A = 1.0;
      est.exact = true;
      break;
    case NonlinearityKind::Custom:
      break;
  }
  if (est.exact && std::abs(A_hat - A) > 1e-6 * (1 + std::abs(A)))
    throw NonConvergent("estimate_A: numeric estimate disagrees with closed form");
  est.A = A;

  // side detection: classify each sample against A with a small tolerance,
  // then find the earliest index from which the out-of-tolerance signs are
  // homogeneous through the end of the grid, with at least 8 doublings of
  // stability. Custom tables get a wider tolerance (interpolation and
  // quadrature noise sit well above the stable built-in paths).
  const double tol = (nl.kind() == NonlinearityKind::Custom ? 1e-6 : 1e-9) *
                     std::max(1.0, std::abs(A));
  std::vector<int> cls(n);
  for (std::size_t i = 0; i < n; ++i)
    cls[i] = phi[i] > A + tol ? +1 : (phi[i] < A - tol ? -1 : 0);

  std::ptrdiff_t start = -1;
  int label = 0;
  for (std::size_t i = 0; i + 8 < n; ++i) {
    int pos = 0, neg = 0;
    for (std::size_t j = i; j < n; ++j) {
      if (cls[j] > 0) ++pos;
      if (cls[j] < 0) ++neg;
    }
    if (pos > 0 && neg > 0) continue;
    start = static_cast<std::ptrdiff_t>(i);
    label = pos > 0 ? +1 : (neg > 0 ? -1 : 0);
    break;
  }
  if (start < 0) {
    est.side = Side::Mixed;
    est.s_threshold = s_grid.back();
  } else {
    est.side = label == 0 ? Side::Constant
                          : (label < 0 ? Side::Below : Side::Above);
    est.s_threshold = s_grid[static_cast<std::size_t>(start)];
  }
  return est;
}

inline void Nonlinearity::finish_() {
  AEstimate est = estimate_A(*this, default_a_grid(*this));
  A_ = est.A;
  A_exact_ = est.exact;
  side_ = est.side;
  s_thr_ = est.s_threshold;
}

// ---------------------------------------------------------------------------
// Profile of all analytic objects at one point
// ---------------------------------------------------------------------------

struct ProfileSample {
  double s = 0;
  double f_val = 0;
  double fprime_val = 0;
  double F_val = 0;
  double Finv_of_F = 0;
  double fprimeF = 0;
};

inline ProfileSample profile(const Nonlinearity& nl, double s) {
  if (!(s > nl.domain_floor()))
    throw OutOfRange("profile: s must exceed the domain floor");
  ProfileSample ps;
  ps.s = s;
  ps.f_val = nl.f(s);
  ps.fprime_val = nl.fprime(s);
  ps.F_val = nl.F(s);
  ps.Finv_of_F = ps.F_val > 0 && std::isfinite(ps.F_val)
                     ? nl.F_inv(ps.F_val)
                     : nl.F_inv_log(nl.F_log(s));
  ps.fprimeF = nl.fprimeF(s);
  return ps;
}

}  // namespace superheat
