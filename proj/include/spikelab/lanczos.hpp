#pragma once

// Largest eigenvalue of a dense symmetric matrix by Lanczos iteration with
// full reorthogonalization. Used on the Monte Carlo path where only lambda_1
// is needed and a full O(n^3) solve per trial is too slow.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "spikelab/errors.hpp"
#include "spikelab/rng.hpp"

namespace spikelab {

struct LanczosResult {
  double value = 0.0;
  double residual = 0.0;  // ||M x - value x|| for the returned Ritz vector
  int iterations = 0;
  Eigen::VectorXd vector;
};

struct LanczosOptions {
  double rel_tol = 1e-11;  // residual target relative to the spectral-radius estimate
  int max_iter = 0;        // 0 means n
  int check_every = 8;
  std::uint64_t start_seed = 0x5eed5eedULL;
};

inline LanczosResult lanczos_largest(const Eigen::MatrixXd& M, const LanczosOptions& opt = {}) {
  const Eigen::Index n = M.rows();
  require(n >= 1 && M.cols() == n, "lanczos: square nonempty matrix required");
  const int max_iter = static_cast<int>(opt.max_iter > 0 ? std::min<Eigen::Index>(opt.max_iter, n) : n);

  Eigen::MatrixXd V(n, max_iter + 1);
  Eigen::VectorXd alpha(max_iter), beta(max_iter);

  RngStream rng(opt.start_seed ^ static_cast<std::uint64_t>(n));
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = rng.uniform() - 0.5;
  q.normalize();
  V.col(0) = q;

  Eigen::VectorXd w(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  LanczosResult out;

  for (int j = 0; j < max_iter; ++j) {
    w.noalias() = M * V.col(j);
    alpha[j] = V.col(j).dot(w);
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      auto basis = V.leftCols(j + 1);
      Eigen::VectorXd coeff = basis.transpose() * w;
      w.noalias() -= basis * coeff;
    }
    beta[j] = w.norm();
    const int m = j + 1;

    const bool exhausted = beta[j] <= 1e-14 * std::max(1.0, std::abs(alpha[j]));
    if (exhausted || m == max_iter || (m % opt.check_every == 0)) {
      Eigen::VectorXd diag = alpha.head(m);
      Eigen::VectorXd sub = beta.head(std::max(m - 1, 0));
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      if (tri.info() != Eigen::Success) throw NumericFailure("lanczos: tridiagonal solve failed");
      const double top = tri.eigenvalues()[m - 1];
      const double radius = std::max(std::abs(top), std::abs(tri.eigenvalues()[0]));
      const double res = std::abs(beta[j] * tri.eigenvectors()(m - 1, m - 1));
      if (exhausted || res <= opt.rel_tol * std::max(radius, 1e-300) || m == max_iter) {
        out.value = top;
        out.residual = exhausted ? 0.0 : res;
        out.iterations = m;
        out.vector = V.leftCols(m) * tri.eigenvectors().col(m - 1);
        if (!exhausted && m == max_iter && m < n && res > opt.rel_tol * radius)
          throw NumericFailure("lanczos: no convergence after " + std::to_string(m) +
                               " iterations (residual " + std::to_string(res) + ")");
        return out;
      }
    }
    V.col(j + 1) = w / beta[j];
  }
  throw NumericFailure("lanczos: exhausted iteration budget");
}

}  // namespace spikelab
