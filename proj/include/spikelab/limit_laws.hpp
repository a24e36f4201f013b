#pragma once

// Limit laws and limit functions of the largest eigenvalue.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "spikelab/combinatorics.hpp"
#include "spikelab/errors.hpp"

namespace spikelab {

inline double f_bbp(double x) {
  require(x > 0.0, "f_bbp: x must be > 0");
  return x < 1.0 ? 2.0 : x + 1.0 / x;
}

inline double f_inverse_upper(double y) {
  require(y >= 2.0, "f_inverse_upper: y must be >= 2");
  return 0.5 * (y + std::sqrt((y - 2.0) * (y + 2.0)));
}

// P(E_alpha < x) = exp(-x^-alpha).
inline double frechet_E_cdf(double alpha, double x) {
  require(alpha > 0.0, "frechet_E_cdf: alpha must be > 0");
  if (x <= 0.0) return 0.0;
  return std::exp(-std::pow(x, -alpha));
}

// P(zeta_c < x) = exp(-c x^-4 / 2).
inline double zeta_cdf(double c, double x) {
  require(c > 0.0, "zeta_cdf: c must be > 0");
  if (x <= 0.0) return 0.0;
  return std::exp(-c * std::pow(x, -4.0) / 2.0);
}

// Law of f(zeta_c): atom exp(-c/2) at 2.
inline double f_zeta_cdf(double c, double y) {
  if (y < 2.0) return 0.0;
  return zeta_cdf(c, f_inverse_upper(y));
}

inline double thm1_cdf(double theta, double alpha, double y) {
  require(theta >= 0.0, "thm1_cdf: theta must be >= 0");
  return y < theta ? 0.0 : frechet_E_cdf(alpha, y);
}

// `F` is the caller's value of F(theta); it is only bracketed in general.
inline double thm2_cdf(double F, double c, double y) {
  require(F >= 2.0, "thm2_cdf: F must be >= 2");
  return y < F ? 0.0 : f_zeta_cdf(c, y);
}

inline double thm3_cdf(double theta, double c, double y) {
  require(theta > 0.0, "thm3_cdf: theta must be > 0");
  return y < f_bbp(theta) ? 0.0 : f_zeta_cdf(c, y);
}

namespace law {
struct FrechetE { double alpha; };
struct Zeta { double c; };
struct FOfZeta { double c; };
struct Thm1 { double theta, alpha; };
struct Thm2 { double theta, c, F; };
struct Thm3 { double theta, c; };
}  // namespace law

using LimitLawSpec = std::variant<law::FrechetE, law::Zeta, law::FOfZeta, law::Thm1, law::Thm2, law::Thm3>;

inline double cdf(const LimitLawSpec& spec, double y) {
  return std::visit(
      [y](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, law::FrechetE>) return frechet_E_cdf(s.alpha, y);
        else if constexpr (std::is_same_v<T, law::Zeta>) return zeta_cdf(s.c, y);
        else if constexpr (std::is_same_v<T, law::FOfZeta>) return f_zeta_cdf(s.c, y);
        else if constexpr (std::is_same_v<T, law::Thm1>) return thm1_cdf(s.theta, s.alpha, y);
        else if constexpr (std::is_same_v<T, law::Thm2>) return thm2_cdf(s.F, s.c, y);
        else return thm3_cdf(s.theta, s.c, y);
      },
      spec);
}

inline std::string describe(const LimitLawSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, law::FrechetE>) return "frechet_E";
        else if constexpr (std::is_same_v<T, law::Zeta>) return "zeta";
        else if constexpr (std::is_same_v<T, law::FOfZeta>) return "f_of_zeta";
        else if constexpr (std::is_same_v<T, law::Thm1>) return "thm1";
        else if constexpr (std::is_same_v<T, law::Thm2>) return "thm2";
        else return "thm3";
      },
      spec);
}

// ---------------------------------------------------------------------------
// G1, G2

struct GFunctionResult {
  double value = 0.0;
  double inner_root = 0.0;
  double residual = 0.0;  // |log lhs - log rhs| of the implicit equation
};

namespace detail {

// Root of a strictly decreasing log-equation on (lo, hi): bisection, then Newton.
inline double solve_decreasing(const std::function<double(double)>& phi,
                               const std::function<double(double)>& dphi, double lo, double hi) {
  double a = lo, b = hi;
  if (!(phi(a) > 0.0 && phi(b) < 0.0)) throw NumericFailure("G: root not bracketed");
  while (b - a > 1e-12) {
    const double m = 0.5 * (a + b);
    (phi(m) > 0.0 ? a : b) = m;
  }
  double x = 0.5 * (a + b);
  for (int k = 0; k < 3; ++k) {
    const double step = phi(x) / dphi(x);
    const double next = x - step;
    if (!(next > lo && next < hi)) break;
    x = next;
    if (std::abs(step) < 1e-17) break;
  }
  return x;
}

}  // namespace detail

// (2-3x)^3 / (x(1-x)^2) = theta^2, x in (0, 2/3); G1 = theta (2-2x)/(2-3x).
inline GFunctionResult G1(double theta) {
  require(theta > 0.0 && std::isfinite(theta), "G1: theta must be > 0");
  const double target = 2.0 * std::log(theta);
  auto phi = [&](double x) {
    return 3.0 * std::log(2.0 - 3.0 * x) - std::log(x) - 2.0 * std::log1p(-x) - target;
  };
  auto dphi = [](double x) { return -9.0 / (2.0 - 3.0 * x) - 1.0 / x + 2.0 / (1.0 - x); };
  const double lo = 1e-300, hi = 2.0 / 3.0 - 1e-15;
  GFunctionResult r;
  r.inner_root = detail::solve_decreasing(phi, dphi, lo, hi);
  r.residual = std::abs(phi(r.inner_root));
  r.value = theta * (2.0 - 2.0 * r.inner_root) / (2.0 - 3.0 * r.inner_root);
  return r;
}

// (6-7x)^(7/3) / (x^(1/3)(1-x)^2) = 36 theta^2 / 5^(2/3), x in (0, 6/7);
// G2 = theta (2-2x)/(2-7x/3).
inline GFunctionResult G2(double theta) {
  require(theta > 0.0 && std::isfinite(theta), "G2: theta must be > 0");
  const double target = std::log(36.0) + 2.0 * std::log(theta) - (2.0 / 3.0) * std::log(5.0);
  auto phi = [&](double x) {
    return (7.0 / 3.0) * std::log(6.0 - 7.0 * x) - std::log(x) / 3.0 - 2.0 * std::log1p(-x) - target;
  };
  auto dphi = [](double x) {
    return -(49.0 / 3.0) / (6.0 - 7.0 * x) - 1.0 / (3.0 * x) + 2.0 / (1.0 - x);
  };
  const double lo = 1e-300, hi = 6.0 / 7.0 - 1e-15;
  GFunctionResult r;
  r.inner_root = detail::solve_decreasing(phi, dphi, lo, hi);
  r.residual = std::abs(phi(r.inner_root));
  r.value = theta * (2.0 - 2.0 * r.inner_root) / (2.0 - 7.0 * r.inner_root / 3.0);
  return r;
}

// ---------------------------------------------------------------------------
// F(theta) = limsup s_1(theta, p)^(1/(2p)), reported as a finite-p sequence.

struct FEstimate {
  double theta = 0.0;
  std::vector<int> p;
  std::vector<double> value;  // s_1(theta, p)^(1/(2p))
  double bracket_lo = 0.0;    // max(2, G2)
  double bracket_hi = 0.0;    // max(2, G1)
  double last() const { return value.empty() ? NAN : value.back(); }
};

inline FEstimate estimate_F(double theta, int p_max) {
  require(theta > 0.0, "estimate_F: theta must be > 0");
  require(p_max >= 2 && p_max <= 1000, "estimate_F: p_max must lie in [2, 1000]");
  const S1LogTable table(p_max);
  FEstimate out;
  out.theta = theta;
  for (int p = 2; p <= p_max; ++p) {
    out.p.push_back(p);
    out.value.push_back(std::exp(table.log_s1(theta, p) / (2.0 * p)));
  }
  out.bracket_lo = std::max(2.0, G2(theta).value);
  out.bracket_hi = std::max(2.0, G1(theta).value);
  return out;
}

// ---------------------------------------------------------------------------
// Variational suprema. Domains are mapped onto unit boxes and searched by a
// coarse grid followed by repeated zooming around the best candidates.

namespace detail {

// x log x with 0 log 0 = 0.
inline double xlogx(double x) { return x <= 0.0 ? 0.0 : x * std::log(x); }

template <std::size_t D>
struct ZoomResult {
  double value = -INFINITY;
  std::array<double, D> arg{};
};

template <std::size_t D>
ZoomResult<D> zoom_maximize(const std::function<double(const std::array<double, D>&)>& logf, int grid,
                            int levels, int starts) {
  struct Cand { double v; std::array<double, D> u; };
  std::vector<Cand> coarse;
  std::array<int, D> idx{};
  std::size_t total = 1;
  for (std::size_t d = 0; d < D; ++d) total *= static_cast<std::size_t>(grid) + 1;
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rem = k;
    std::array<double, D> u{};
    for (std::size_t d = 0; d < D; ++d) {
      idx[d] = static_cast<int>(rem % (grid + 1));
      rem /= grid + 1;
      u[d] = static_cast<double>(idx[d]) / grid;
    }
    coarse.push_back({logf(u), u});
  }
  std::sort(coarse.begin(), coarse.end(), [](const Cand& a, const Cand& b) { return a.v > b.v; });

  ZoomResult<D> best;
  const int fine = 20;
  for (int s = 0; s < std::min<int>(starts, static_cast<int>(coarse.size())); ++s) {
    Cand c = coarse[static_cast<std::size_t>(s)];
    double half = 1.0 / grid;
    for (int level = 0; level < levels; ++level) {
      std::array<double, D> lo{}, hi{};
      for (std::size_t d = 0; d < D; ++d) {
        lo[d] = std::max(0.0, c.u[d] - half);
        hi[d] = std::min(1.0, c.u[d] + half);
      }
      std::size_t cells = 1;
      for (std::size_t d = 0; d < D; ++d) cells *= fine + 1;
      for (std::size_t k = 0; k < cells; ++k) {
        std::size_t rem = k;
        std::array<double, D> u{};
        for (std::size_t d = 0; d < D; ++d) {
          const int i = static_cast<int>(rem % (fine + 1));
          rem /= fine + 1;
          u[d] = lo[d] + (hi[d] - lo[d]) * i / fine;
        }
        const double v = logf(u);
        if (v > c.v) c = {v, u};
      }
      half *= 0.25;
    }
    if (c.v > best.value) {
      best.value = c.v;
      best.arg = c.u;
    }
  }
  return best;
}

}  // namespace detail

struct SupResult {
  double grid_value = 0.0;
  double analytic_value = 0.0;
  std::vector<double> argmax;  // in the lemma's own coordinates
};

// log h on D = {y <= z <= x, y <= 2-2x}.
inline double log_h_lemma9(double theta, double x, double y, double z) {
  using detail::xlogx;
  return (2.0 - 2.0 * x) * std::log(theta) + xlogx(z) - xlogx(y) - xlogx(z - y) + xlogx(2.0 - 2.0 * x) -
         xlogx(y) - xlogx(2.0 - 2.0 * x - y) + xlogx(2.0 * x - z) - xlogx(x) - xlogx(x - z);
}

// q(x) = theta^(2-2x) 4 / (x^x (2-x)^(2-x)), the reduction along the critical surface.
inline double q_lemma9(double theta, double x) {
  using detail::xlogx;
  return std::exp((2.0 - 2.0 * x) * std::log(theta) + std::log(4.0) - xlogx(x) - xlogx(2.0 - x));
}

inline SupResult sup_h_lemma9(double theta) {
  require(theta > 0.0, "sup_h_lemma9: theta must be > 0");
  auto map = [](const std::array<double, 3>& u) {
    const double x = u[0];
    const double y = u[1] * std::min(x, 2.0 - 2.0 * x);
    const double z = y + u[2] * (x - y);
    return std::array<double, 3>{x, y, z};
  };
  auto logf = [&](const std::array<double, 3>& u) {
    const auto p = map(u);
    return log_h_lemma9(theta, p[0], p[1], p[2]);
  };
  const auto best = detail::zoom_maximize<3>(logf, 40, 12, 6);
  SupResult r;
  r.grid_value = std::exp(best.value);
  const auto p = map(best.arg);
  r.argmax.assign(p.begin(), p.end());
  double analytic = std::max(q_lemma9(theta, 0.0), q_lemma9(theta, 1.0));
  if (theta >= 1.0) analytic = std::max(analytic, q_lemma9(theta, 2.0 / (theta * theta + 1.0)));
  r.analytic_value = analytic;
  if (std::abs(r.grid_value - r.analytic_value) > 1e-4)
    throw NumericFailure("sup_h_lemma9: grid " + std::to_string(r.grid_value) + " vs analytic " +
                         std::to_string(r.analytic_value));
  return r;
}

inline double log_h1(double theta, double x, double y) {
  using detail::xlogx;
  return (2.0 - 2.0 * x) * std::log(theta) + xlogx(2.0 - 2.0 * x) - xlogx(y) - xlogx(2.0 - 2.0 * x - y) +
         x * std::log(4.0);
}

inline double log_h2(double theta, double x, double y) {
  using detail::xlogx;
  return (2.0 - 2.0 * x) * std::log(theta) + xlogx(2.0 - 2.0 * x) - xlogx(y) - xlogx(2.0 - 2.0 * x - y) +
         (x - y) * std::log(4.0) + 2.0 * y * std::log(1.25);
}

namespace detail {
inline SupResult sup_2d(double theta, double (*logh)(double, double, double), double y_ratio,
                        double analytic, const char* name) {
  auto map = [y_ratio](const std::array<double, 2>& u) {
    const double x = u[0];
    return std::array<double, 2>{x, u[1] * std::min(y_ratio * x, 2.0 - 2.0 * x)};
  };
  auto logf = [&](const std::array<double, 2>& u) {
    const auto p = map(u);
    return logh(theta, p[0], p[1]);
  };
  const auto best = zoom_maximize<2>(logf, 200, 12, 6);
  SupResult r;
  r.grid_value = std::exp(best.value);
  const auto p = map(best.arg);
  r.argmax.assign(p.begin(), p.end());
  r.analytic_value = analytic;
  if (std::abs(r.grid_value - r.analytic_value) > 1e-4)
    throw NumericFailure(std::string(name) + ": grid " + std::to_string(r.grid_value) + " vs analytic " +
                         std::to_string(r.analytic_value));
  return r;
}
}  // namespace detail

// D1 = {y <= x, y <= 2-2x}.
inline SupResult sup_h1(double theta) {
  require(theta > 0.0, "sup_h1: theta must be > 0");
  const double g = G1(theta).value;
  return detail::sup_2d(theta, &log_h1, 1.0, std::max(4.0, g * g), "sup_h1");
}

// D2 = {y <= x/3, y <= 2-2x}.
inline SupResult sup_h2(double theta) {
  require(theta > 0.0, "sup_h2: theta must be > 0");
  const double g = G2(theta).value;
  return detail::sup_2d(theta, &log_h2, 1.0 / 3.0, std::max(4.0, g * g), "sup_h2");
}

}  // namespace spikelab
