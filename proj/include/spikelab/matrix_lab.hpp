#pragma once

// Wigner matrices with heavy-tailed entries, rank-one spikes, spectra,
// entry-size truncation bands and the deterministic trace sandwich bounds.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spikelab/errors.hpp"
#include "spikelab/lanczos.hpp"
#include "spikelab/rng.hpp"
#include "spikelab/tail_sampler.hpp"

namespace spikelab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Spike vectors

namespace spike {
struct Basis {
  std::size_t index = 1;  // 1-based coordinate
};
struct UniformDelocalized {};
struct HeadLocalized {
  std::size_t k = 1;
  std::vector<double> weights;  // empty means equal weights
};
struct Explicit {
  std::vector<double> values;
};
}  // namespace spike

using SpikeVectorSpec =
    std::variant<spike::Basis, spike::UniformDelocalized, spike::HeadLocalized, spike::Explicit>;

inline Vector realize_spike(const SpikeVectorSpec& spec, std::size_t n) {
  require(n >= 1, "realize_spike: n must be >= 1");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
  if (const auto* b = std::get_if<spike::Basis>(&spec)) {
    require(b->index >= 1 && b->index <= n, "realize_spike: basis index out of range");
    v[static_cast<Eigen::Index>(b->index - 1)] = 1.0;
    return v;
  }
  if (std::holds_alternative<spike::UniformDelocalized>(spec)) {
    v.setConstant(1.0 / std::sqrt(static_cast<double>(n)));
    return v;
  }
  if (const auto* h = std::get_if<spike::HeadLocalized>(&spec)) {
    require(h->k >= 1 && h->k <= n, "realize_spike: k must lie in [1, n]");
    require(h->weights.empty() || h->weights.size() == h->k,
            "realize_spike: need exactly k head weights");
    for (std::size_t i = 0; i < h->k; ++i) {
      const double w = h->weights.empty() ? 1.0 : h->weights[i];
      require(w != 0.0 && std::isfinite(w), "realize_spike: head weights must be finite and nonzero");
      v[static_cast<Eigen::Index>(i)] = w;
    }
    return v / v.norm();
  }
  const auto& e = std::get<spike::Explicit>(spec);
  require(e.values.size() == n, "realize_spike: explicit vector has wrong length");
  for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = e.values[i];
  const double norm = v.norm();
  require(norm > 0.0 && std::isfinite(norm), "realize_spike: explicit vector must be nonzero");
  return v / norm;
}

inline bool spike_is_localized(const SpikeVectorSpec& spec) {
  return std::holds_alternative<spike::Basis>(spec) ||
         std::holds_alternative<spike::HeadLocalized>(spec);
}

// ---------------------------------------------------------------------------
// Model

enum class Scaling { InvSqrtN, InvBn };

struct SpikedModel {
  std::size_t n = 1;
  Scaling scaling = Scaling::InvBn;
  double theta = 0.0;
  SpikeVectorSpec spike = spike::UniformDelocalized{};
  TailLaw law = TailLaw::pareto(2.0);

  void validate() const {
    require(n >= 1, "model: n must be >= 1");
    require(theta >= 0.0 && std::isfinite(theta), "model: theta must be finite and >= 0");
    if (scaling == Scaling::InvBn) {
      require(law.alpha() < 4.0, "model: 1/b_n scaling requires alpha < 4");
    } else {
      require(law.alpha() == 4.0, "model: 1/sqrt(n) scaling requires alpha = 4");
      const auto m2 = law.second_moment();
      require(law.family() == TailFamily::ExplicitSurvival || (m2 && std::abs(*m2 - 1.0) < 1e-12),
              "model: 1/sqrt(n) scaling requires unit variance");
    }
  }

  double scale_factor() const {
    if (scaling == Scaling::InvSqrtN) return 1.0 / std::sqrt(static_cast<double>(n));
    return 1.0 / law.b_of(static_cast<double>(n));
  }
};

// Upper triangle (diagonal included) drawn row by row from one stream and
// reflected.
inline Matrix build_wigner(std::size_t n, const TailLaw& law, std::uint64_t seed) {
  require(n >= 1, "build_wigner: n must be >= 1");
  const auto N = static_cast<Eigen::Index>(n);
  Matrix A(N, N);
  RngStream rng(seed);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = i; j < N; ++j) {
      const double a = law.sample(rng);
      A(i, j) = a;
      A(j, i) = a;
    }
  return A;
}

inline Matrix perturbed_matrix(const Matrix& A, const SpikedModel& model) {
  model.validate();
  require(A.rows() == A.cols() && static_cast<std::size_t>(A.rows()) == model.n,
          "perturbed_matrix: A must be n x n");
  const Vector v = realize_spike(model.spike, model.n);
  Matrix P = model.scale_factor() * A;
  if (model.theta != 0.0) P.noalias() += model.theta * (v * v.transpose());
  return P;
}

// Scaled max over i <= j of |a_ij|, diagonal included.
inline double max_entry_stat(const Matrix& A, double scale) {
  require(A.rows() == A.cols() && A.rows() >= 1, "max_entry_stat: square nonempty matrix required");
  double best = 0.0;
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i) best = std::max(best, std::abs(A(i, j)));
  return scale * best;
}

// ---------------------------------------------------------------------------
// Spectra

inline constexpr Eigen::Index kDenseEigenCutoff = 400;

// k largest eigenvalues in descending order.
inline std::vector<double> top_eigenvalues(const Matrix& M, std::size_t k) {
  const Eigen::Index n = M.rows();
  require(n >= 1 && M.cols() == n, "top_eigenvalues: square nonempty matrix required");
  require(k >= 1 && k <= static_cast<std::size_t>(n), "top_eigenvalues: k must lie in [1, n]");
  if (k == 1 && n > kDenseEigenCutoff) return {lanczos_largest(M).value};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(M, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericFailure("top_eigenvalues: eigensolver did not converge");
  const Vector& ev = solver.eigenvalues();  // ascending
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = ev[n - 1 - static_cast<Eigen::Index>(i)];
  return out;
}

inline double largest_eigenvalue(const Matrix& M) { return top_eigenvalues(M, 1).front(); }

// All eigenvalues, ascending.
inline Vector spectrum(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(M, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericFailure("spectrum: eigensolver did not converge");
  return solver.eigenvalues();
}

inline double operator_norm(const Matrix& M) {
  const Vector ev = spectrum(M);
  return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

// tr(M^p) by repeated multiplication.
inline double trace_power(const Matrix& M, int p) {
  require(p >= 1, "trace_power: p must be >= 1");
  require(M.rows() == M.cols(), "trace_power: square matrix required");
  if (p == 1) return M.trace();
  // tr(M^p) = <M^a, M^b> with a + b = p, M symmetric.
  const int a = p / 2;
  Matrix Ma = M;
  for (int i = 1; i < a; ++i) Ma = Ma * M;
  if (p % 2 == 0) return Ma.cwiseProduct(Ma).sum();
  const Matrix Mb = Ma * M;
  return Ma.cwiseProduct(Mb).sum();
}

// ---------------------------------------------------------------------------
// Truncation bands

struct TruncationParams {
  std::optional<double> x;  // alpha < 4: small band is |a| <= n^x
  double delta = 0.01;      // alpha < 4: medium band ends at n^(3/(2 alpha) + delta)
  double delta1 = 0.01;     // alpha = 4: small band is |a| <= n^(1/4 - delta1)
  double delta2 = 0.01;     // alpha = 4: medium band ends at n^(3/8 + delta2)
  double kappa = 0.5;
};

// Open interval of admissible x for alpha < 4.
inline std::pair<double, double> admissible_x_interval(double alpha) {
  require(alpha > 0.0 && alpha < 4.0, "admissible_x_interval: alpha must lie in (0, 4)");
  if (alpha <= 2.0) return {1.0 / alpha - 1.0 / (2.0 * alpha * alpha), 1.0 / alpha};
  const double lo1 = (alpha - 2.0) / (alpha * (alpha - 1.0));
  const double lo2 = (3.0 * alpha - 8.0) / (2.0 * alpha * (alpha - 2.0));
  return {std::max(lo1, lo2), 0.25};
}

struct TruncationThresholds {
  double small_max = 0.0;   // |a| <= small_max
  double medium_max = 0.0;  // small_max < |a| <= medium_max
  double huge_min = 0.0;    // |a| >= huge_min (alpha < 4) or > huge_min (alpha = 4)
  bool huge_inclusive = true;
};

struct TruncationSplit {
  Matrix small, medium, big, huge;  // P_s, P_m, P_{b,kappa}, P_{B,kappa}
  TruncationThresholds thresholds;
  Matrix sum() const { return small + medium + big + huge; }
};

inline TruncationThresholds truncation_thresholds(const SpikedModel& model, const TruncationParams& params) {
  model.validate();
  require(params.kappa > 0.0, "truncation: kappa must be positive");
  const double n = static_cast<double>(model.n);
  TruncationThresholds t;
  if (model.scaling == Scaling::InvBn) {
    const double alpha = model.law.alpha();
    const auto [lo, hi] = admissible_x_interval(alpha);
    const double x = params.x.value_or(0.5 * (lo + hi));
    require(x > lo && x < hi, "truncation: x outside the admissible open interval");
    require(params.delta > 0.0 && params.delta < 1.0 / (2.0 * alpha),
            "truncation: delta must lie in (0, 1/(2 alpha))");
    t.small_max = std::pow(n, x);
    t.medium_max = std::pow(n, 1.5 / alpha + params.delta);
    t.huge_min = params.kappa * model.law.b_of(n);
    t.huge_inclusive = true;
  } else {
    require(params.delta1 > 0.0 && params.delta1 < 1.0 / 64.0, "truncation: delta1 must lie in (0, 1/64)");
    require(params.delta2 > 0.0 && params.delta2 < 1.0 / 64.0, "truncation: delta2 must lie in (0, 1/64)");
    t.small_max = std::pow(n, 0.25 - params.delta1);
    t.medium_max = std::pow(n, 0.375 + params.delta2);
    t.huge_min = params.kappa * std::sqrt(n);
    t.huge_inclusive = false;
  }
  return t;
}

// Every entry p_ij = scale a_ij + theta v_i v_j goes whole into the band
// selected by |a_ij|. The huge band takes precedence, then small, medium, big;
// at small n the bands can overlap and this order keeps them disjoint.
inline TruncationSplit truncation_split(const Matrix& A, const SpikedModel& model,
                                        const TruncationParams& params = {}) {
  const TruncationThresholds t = truncation_thresholds(model, params);
  const Matrix P = perturbed_matrix(A, model);
  const Eigen::Index N = A.rows();
  TruncationSplit split{Matrix::Zero(N, N), Matrix::Zero(N, N), Matrix::Zero(N, N),
                        Matrix::Zero(N, N), t};
  for (Eigen::Index j = 0; j < N; ++j)
    for (Eigen::Index i = 0; i < N; ++i) {
      const double a = std::abs(A(i, j));
      const bool huge = t.huge_inclusive ? a >= t.huge_min : a > t.huge_min;
      Matrix* part = huge                  ? &split.huge
                     : a <= t.small_max    ? &split.small
                     : a <= t.medium_max   ? &split.medium
                                           : &split.big;
      (*part)(i, j) = P(i, j);
    }
  return split;
}

// ---------------------------------------------------------------------------
// Trace sandwich inequalities for a low-rank perturbation Q of S.

struct SandwichReport {
  double lower = 0.0;   // even form only; -inf for the odd form
  double middle = 0.0;  // tr((S+Q)^k) - tr(S^k)
  double upper = 0.0;
  bool lower_holds = true;
  bool upper_holds = true;
  double slack = 0.0;  // min(middle - lower, upper - middle)
  bool holds() const { return lower_holds && upper_holds; }
};

inline std::size_t numerical_rank(const Matrix& Q, double rel_tol = 1e-10) {
  const Vector ev = spectrum(Q);
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev[i]) > rel_tol * scale) ++r;
  return ev.cwiseAbs().maxCoeff() == 0.0 ? 0 : r;
}

namespace detail {
inline void check_sandwich_inputs(const Matrix& S, const Matrix& Q, int m, int p) {
  require(S.rows() == S.cols() && Q.rows() == Q.cols() && S.rows() == Q.rows(),
          "sandwich: S and Q must be square of equal size");
  require(m >= 1, "sandwich: m must be >= 1");
  require(p >= 1, "sandwich: p must be >= 1");
  if (numerical_rank(Q) > static_cast<std::size_t>(2 * m))
    throw InvalidArgument("sandwich: rank(Q) exceeds 2m");
}

// Sum of lambda^k over the spectrum; agrees with trace_power but stays
// accurate when the two traces nearly cancel.
inline double power_sum(const Vector& ev, int k) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) s += std::pow(ev[i], k);
  return s;
}

inline double tolerance(const Vector& a, const Vector& b, int k) {
  const double r = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return 1e-9 * static_cast<double>(a.size()) * std::pow(std::max(r, 1e-300), k);
}
}  // namespace detail

// ||S+Q||^2p - 7m ||S||^2p <= tr((S+Q)^2p) - tr(S^2p) <= 4m ||S+Q||^2p
inline SandwichReport check_sandwich_even(const Matrix& S, const Matrix& Q, int m, int p) {
  detail::check_sandwich_inputs(S, Q, m, p);
  require(6 * (m + 1) <= S.rows(), "sandwich (even): m must be <= n/6 - 1");
  const Vector es = spectrum(S);
  const Vector esq = spectrum(S + Q);
  const int k = 2 * p;
  const double norm_s = std::max(std::abs(es[0]), std::abs(es[es.size() - 1]));
  const double norm_sq = std::max(std::abs(esq[0]), std::abs(esq[esq.size() - 1]));
  SandwichReport r;
  r.middle = detail::power_sum(esq, k) - detail::power_sum(es, k);
  r.lower = std::pow(norm_sq, k) - 7.0 * m * std::pow(norm_s, k);
  r.upper = 4.0 * m * std::pow(norm_sq, k);
  const double tol = detail::tolerance(es, esq, k);
  r.lower_holds = r.lower <= r.middle + tol;
  r.upper_holds = r.middle <= r.upper + tol;
  r.slack = std::min(r.middle - r.lower, r.upper - r.middle);
  return r;
}

// tr((S+Q)^(2p+1)) - tr(S^(2p+1))
//     <= 2m lambda_1(S+Q)^(2p+1) + lambda_n(S+Q)^(2p+1) + 3m ||S||^(2p+1)
inline SandwichReport check_sandwich_odd(const Matrix& S, const Matrix& Q, int m, int p) {
  detail::check_sandwich_inputs(S, Q, m, p);
  require(4 * (m + 1) <= S.rows(), "sandwich (odd): m must be <= n/4 - 1");
  const Vector es = spectrum(S);
  const Vector esq = spectrum(S + Q);
  const int k = 2 * p + 1;
  const double norm_s = std::max(std::abs(es[0]), std::abs(es[es.size() - 1]));
  SandwichReport r;
  r.middle = detail::power_sum(esq, k) - detail::power_sum(es, k);
  r.lower = -std::numeric_limits<double>::infinity();
  r.upper = 2.0 * m * std::pow(esq[esq.size() - 1], k) + std::pow(esq[0], k) +
            3.0 * m * std::pow(norm_s, k);
  r.upper_holds = r.middle <= r.upper + detail::tolerance(es, esq, k);
  r.slack = r.upper - r.middle;
  return r;
}

}  // namespace spikelab
