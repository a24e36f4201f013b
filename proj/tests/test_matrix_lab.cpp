#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "spikelab/matrix_lab.hpp"

using namespace spikelab;

namespace {

Matrix random_symmetric(Eigen::Index n, std::uint64_t seed) {
  RngStream rng(seed);
  Matrix M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) M(i, j) = M(j, i) = rng.normal();
  return M;
}

Vector random_unit(Eigen::Index n, RngStream& rng) {
  Vector u(n);
  for (Eigen::Index i = 0; i < n; ++i) u[i] = rng.normal();
  return u / u.norm();
}

SpikedModel alpha2_model(std::size_t n, double theta = 0.0) {
  SpikedModel m;
  m.n = n;
  m.scaling = Scaling::InvBn;
  m.law = TailLaw::pareto(2.0);
  m.theta = theta;
  return m;
}

SpikedModel alpha4_model(std::size_t n, double theta = 0.0) {
  SpikedModel m;
  m.n = n;
  m.scaling = Scaling::InvSqrtN;
  m.law = TailLaw::pareto4_unit_variance();
  m.theta = theta;
  return m;
}

}  // namespace

TEST(BuildWigner, ShapeSymmetryDeterminism) {
  const auto law = TailLaw::pareto(2.0);
  const Matrix one = build_wigner(1, law, 5);
  EXPECT_EQ(one.rows(), 1);
  const Matrix A = build_wigner(40, law, 11);
  const Matrix B = build_wigner(40, law, 11);
  EXPECT_TRUE((A.array() == B.array()).all());
  EXPECT_TRUE((A.array() == A.transpose().array()).all());
  EXPECT_FALSE((A.array() == build_wigner(40, law, 12).array()).all());
}

TEST(BuildWigner, ExceedancesOfBnArePoisson) {
  // About one of the n(n+1)/2 upper entries exceeds b_n on average.
  const auto law = TailLaw::pareto(2.0);
  const std::size_t n = 500;
  const double bn = law.b_of(static_cast<double>(n));
  double total = 0.0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    const Matrix A = build_wigner(n, law, derive_seed(1, n, static_cast<std::uint64_t>(s)));
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      for (Eigen::Index i = 0; i <= j; ++i) total += std::abs(A(i, j)) >= bn ? 1.0 : 0.0;
  }
  const double expected = 2.0 / (n * n) * (n * (n + 1) / 2.0);
  const double mean = total / seeds;
  EXPECT_NEAR(mean, expected, 4.0 * std::sqrt(expected / seeds));
}

TEST(RealizeSpike, Examples) {
  const Vector u = realize_spike(spike::UniformDelocalized{}, 4);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(u[i], 0.5);
  const Vector e = realize_spike(spike::Basis{1}, 3);
  EXPECT_EQ(e, (Vector(3) << 1, 0, 0).finished());
  const Vector h = realize_spike(spike::HeadLocalized{2, {}}, 5);
  EXPECT_NEAR(h[0], 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(h[1], 1 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(h.tail(3).norm(), 0.0);
}

TEST(RealizeSpike, UnitNormAndRejections) {
  const Vector x = realize_spike(spike::Explicit{{3, 4, 0}}, 3);
  EXPECT_NEAR(x.norm(), 1.0, 1e-12);
  const Vector h = realize_spike(spike::HeadLocalized{3, {1, -2, 5}}, 10);
  EXPECT_NEAR(h.norm(), 1.0, 1e-12);
  EXPECT_EQ((h.array() != 0.0).count(), 3);
  EXPECT_THROW(realize_spike(spike::Basis{4}, 3), InvalidArgument);
  EXPECT_THROW(realize_spike(spike::HeadLocalized{6, {}}, 5), InvalidArgument);
  EXPECT_THROW(realize_spike(spike::Explicit{{1, 2}}, 3), InvalidArgument);
  EXPECT_THROW(realize_spike(spike::Explicit{{0, 0, 0}}, 3), InvalidArgument);
}

TEST(Model, ScalingMismatchRejected) {
  SpikedModel m = alpha2_model(10);
  m.scaling = Scaling::InvSqrtN;
  EXPECT_THROW(m.validate(), InvalidArgument);
  SpikedModel q = alpha4_model(10);
  q.scaling = Scaling::InvBn;
  EXPECT_THROW(q.validate(), InvalidArgument);
  SpikedModel r = alpha4_model(10);
  r.law = TailLaw::pareto(4.0);  // variance 2
  EXPECT_THROW(r.validate(), InvalidArgument);
  SpikedModel neg = alpha2_model(10, -1.0);
  EXPECT_THROW(neg.validate(), InvalidArgument);
}

TEST(PerturbedMatrix, Examples) {
  const Matrix A = build_wigner(6, TailLaw::pareto(2.0), 3);
  const SpikedModel m0 = alpha2_model(6);
  EXPECT_TRUE((perturbed_matrix(A, m0).array() == (m0.scale_factor() * A).array()).all());

  SpikedModel m = alpha4_model(3, 2.0);
  m.spike = spike::Basis{1};
  const Matrix P = perturbed_matrix(Matrix::Zero(3, 3), m);
  EXPECT_EQ(P(0, 0), 2.0);
  EXPECT_EQ(P.cwiseAbs().sum(), 2.0);
  EXPECT_NEAR(largest_eigenvalue(P), 2.0, 1e-14);

  const double a = 0.8;
  Matrix B(2, 2);
  B << 0, a, a, 0;
  SpikedModel two = alpha2_model(2, 1.0);
  const double s = 1.0 / std::sqrt(2.0);  // b_2 = (4/2)^(1/2)
  const Matrix Q = perturbed_matrix(B, two);
  EXPECT_NEAR(Q(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(Q(1, 1), 0.5, 1e-15);
  EXPECT_NEAR(Q(0, 1), a * s + 0.5, 1e-15);
  EXPECT_NEAR(Q(1, 0), a * s + 0.5, 1e-15);
}

TEST(TopEigenvalues, SmallExamples) {
  Matrix M(2, 2);
  M << 0, 3, 3, 0;
  const auto ev = top_eigenvalues(M, 2);
  EXPECT_NEAR(ev[0], 3.0, 1e-14);
  EXPECT_NEAR(ev[1], -3.0, 1e-14);

  RngStream rng(1);
  const Vector v = random_unit(7, rng);
  const auto r1 = top_eigenvalues(2.5 * v * v.transpose(), 7);
  EXPECT_NEAR(r1[0], 2.5, 1e-13);
  for (std::size_t i = 1; i < r1.size(); ++i) EXPECT_NEAR(r1[i], 0.0, 1e-13);
  EXPECT_THROW(top_eigenvalues(M, 3), InvalidArgument);
}

TEST(TopEigenvalues, MatchesCharacteristicPolynomialOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix M = random_symmetric(6, seed);
    const auto ours = top_eigenvalues(M, 6);
    const auto ref = oracle::charpoly_eigenvalues(M);
    ASSERT_EQ(ref.size(), 6u);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(ours[static_cast<std::size_t>(i)], ref[static_cast<std::size_t>(5 - i)], 1e-8);
  }
}

TEST(TopEigenvalues, VariationalLowerBound) {
  RngStream rng(8);
  for (Eigen::Index n : {30, 450}) {
    const Matrix M = random_symmetric(n, 77 + n);
    const double l1 = largest_eigenvalue(M);
    for (int k = 0; k < 100; ++k) {
      const Vector u = random_unit(n, rng);
      EXPECT_GE(l1 + 1e-10 * std::abs(l1), u.dot(M * u));
    }
  }
}

TEST(Lanczos, AgreesWithDenseSolver) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Matrix A = build_wigner(600, TailLaw::pareto4_unit_variance(), seed);
    SpikedModel m = alpha4_model(600, 0.8);
    const Matrix P = perturbed_matrix(A, m);
    const auto lz = lanczos_largest(P);
    Eigen::SelfAdjointEigenSolver<Matrix> dense(P, Eigen::EigenvaluesOnly);
    const double ref = dense.eigenvalues()[599];
    EXPECT_NEAR(lz.value, ref, 1e-10 * std::abs(ref));
    EXPECT_NEAR(lz.vector.norm(), 1.0, 1e-10);
    EXPECT_NEAR(lz.vector.dot(P * lz.vector), lz.value, 1e-8);
  }
}

TEST(Lanczos, HeavyTailAlpha2) {
  const Matrix A = build_wigner(500, TailLaw::pareto(2.0), 9);
  const Matrix P = perturbed_matrix(A, alpha2_model(500));
  Eigen::SelfAdjointEigenSolver<Matrix> dense(P, Eigen::EigenvaluesOnly);
  EXPECT_NEAR(largest_eigenvalue(P), dense.eigenvalues()[499], 1e-10 * std::abs(dense.eigenvalues()[499]));
}

TEST(MaxEntryStat, Examples) {
  Matrix A(2, 2);
  A << 1, 5, 5, 2;
  EXPECT_EQ(max_entry_stat(A, 1.0), 5.0);
  Matrix B(2, 2);
  B << 7, 1, 1, 2;
  EXPECT_EQ(max_entry_stat(B, 1.0), 7.0);
  EXPECT_EQ(max_entry_stat(B, 0.5), 3.5);
  B(0, 0) = -9;
  EXPECT_EQ(max_entry_stat(B, 1.0), 9.0);
}

TEST(TracePower, Examples) {
  EXPECT_NEAR(trace_power(Matrix::Identity(3, 3), 4), 3.0, 1e-14);
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 2;
  D(1, 1) = -1;
  EXPECT_NEAR(trace_power(D, 3), 7.0, 1e-14);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix M = random_symmetric(5, 100 + seed);
    const Vector ev = spectrum(M);
    for (int p = 1; p <= 9; ++p) {
      double ref = 0.0;
      for (int i = 0; i < 5; ++i) ref += std::pow(ev[i], p);
      EXPECT_NEAR(trace_power(M, p), ref, 1e-8 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST(Truncation, AdmissibleInterval) {
  const auto [lo2, hi2] = admissible_x_interval(2.0);
  EXPECT_NEAR(lo2, 0.375, 1e-15);
  EXPECT_NEAR(hi2, 0.5, 1e-15);
  const auto [lo3, hi3] = admissible_x_interval(3.0);
  EXPECT_NEAR(lo3, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(hi3, 0.25, 1e-15);
  EXPECT_THROW(admissible_x_interval(4.0), InvalidArgument);
}

TEST(Truncation, RejectsBadParameters) {
  const Matrix A = build_wigner(20, TailLaw::pareto(2.0), 1);
  TruncationParams p;
  p.x = 0.6;
  EXPECT_THROW(truncation_split(A, alpha2_model(20), p), InvalidArgument);
  p.x = 0.375;  // open interval
  EXPECT_THROW(truncation_split(A, alpha2_model(20), p), InvalidArgument);
  TruncationParams q;
  q.delta1 = 0.02;
  const Matrix B = build_wigner(20, TailLaw::pareto4_unit_variance(), 1);
  EXPECT_THROW(truncation_split(B, alpha4_model(20), q), InvalidArgument);
}

TEST(Truncation, AllSmall) {
  const std::size_t n = 50;
  Matrix A = Matrix::Constant(n, n, 0.5);
  SpikedModel m = alpha2_model(n, 1.3);
  const auto split = truncation_split(A, m);
  EXPECT_EQ(split.medium.cwiseAbs().sum(), 0.0);
  EXPECT_EQ(split.big.cwiseAbs().sum(), 0.0);
  EXPECT_EQ(split.huge.cwiseAbs().sum(), 0.0);
  EXPECT_TRUE((split.small.array() == perturbed_matrix(A, m).array()).all());
}

TEST(Truncation, HugeEntryIsolated) {
  const std::size_t n = 50;
  Matrix A = Matrix::Constant(n, n, 0.5);
  SpikedModel m = alpha2_model(n);
  const double bn = m.law.b_of(static_cast<double>(n));
  A(3, 7) = A(7, 3) = bn;  // above kappa * b_n = b_n / 2
  const auto split = truncation_split(A, m);
  EXPECT_EQ((split.huge.array() != 0.0).count(), 2);
  EXPECT_NE(split.huge(3, 7), 0.0);
  EXPECT_NE(split.huge(7, 3), 0.0);
}

TEST(Truncation, PartitionProperty) {
  for (int regime = 0; regime < 2; ++regime)
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const std::size_t n = 120;
      SpikedModel m = regime == 0 ? alpha2_model(n, 1.5) : alpha4_model(n, 1.5);
      const Matrix A = build_wigner(n, m.law, seed);
      const auto s = truncation_split(A, m);
      const Matrix P = perturbed_matrix(A, m);
      EXPECT_LE((s.sum() - P).cwiseAbs().maxCoeff(), 1e-12);
      for (const Matrix* part : {&s.small, &s.medium, &s.big, &s.huge})
        EXPECT_TRUE((part->array() == part->transpose().array()).all());
      const auto support = (s.small.array() != 0).cast<int>() + (s.medium.array() != 0).cast<int>() +
                           (s.big.array() != 0).cast<int>() + (s.huge.array() != 0).cast<int>();
      EXPECT_LE(support.maxCoeff(), 1);
    }
}

TEST(Truncation, NegligibleBands) {
  // ||P_m|| shrinks with n; ||P_b|| stays below 2 kappa.
  auto run = [](std::size_t n, double& worst_big) {
    double med = 0.0;
    const int seeds = 50;
    for (int s = 0; s < seeds; ++s) {
      const SpikedModel m = alpha2_model(n);
      const auto split = truncation_split(build_wigner(n, m.law, derive_seed(5, n, s)), m);
      med += operator_norm(split.medium);
      worst_big = std::max(worst_big, operator_norm(split.big) - 2.0 * 0.5);
    }
    return med / seeds;
  };
  double worst = -1.0;
  const double m100 = run(100, worst);
  const double m400 = run(400, worst);
  EXPECT_LT(m400, m100);
  EXPECT_LE(worst, 0.0);
}

TEST(Sandwich, DegenerateCases) {
  const Matrix S = random_symmetric(30, 4);
  const auto even0 = check_sandwich_even(S, Matrix::Zero(30, 30), 2, 3);
  EXPECT_TRUE(even0.holds());
  EXPECT_NEAR(even0.middle, 0.0, 1e-9);
  const auto odd0 = check_sandwich_odd(S, Matrix::Zero(30, 30), 2, 3);
  EXPECT_TRUE(odd0.holds());

  RngStream rng(4);
  const Vector v = random_unit(30, rng);
  const Matrix Q = 1.7 * v * v.transpose();
  EXPECT_TRUE(check_sandwich_even(Matrix::Zero(30, 30), Q, 2, 2).holds());
  EXPECT_TRUE(check_sandwich_odd(Matrix::Zero(30, 30), Q, 2, 2).holds());
}

TEST(Sandwich, Preconditions) {
  const Matrix S = random_symmetric(30, 5);
  const Matrix Q = random_symmetric(30, 6);  // full rank
  EXPECT_THROW(check_sandwich_even(S, Q, 2, 2), InvalidArgument);
  EXPECT_THROW(check_sandwich_odd(S, Q, 2, 2), InvalidArgument);
  EXPECT_THROW(check_sandwich_even(S, Matrix::Zero(30, 30), 5, 2), InvalidArgument);  // 6(m+1) > n
}

TEST(Sandwich, RandomizedInstances) {
  RngStream rng(2026);
  int violations = 0;
  for (int k = 0; k < 200; ++k) {
    const Matrix S = random_symmetric(30, 1000 + k) / std::sqrt(30.0);
    Matrix Q = Matrix::Zero(30, 30);
    for (int r = 0; r < 4; ++r) {
      const Vector u = random_unit(30, rng);
      Q += (3.0 * rng.uniform() - 1.5) * u * u.transpose();
    }
    const int p = 1 + k % 6;
    violations += check_sandwich_even(S, Q, 2, p).holds() ? 0 : 1;
    violations += check_sandwich_odd(S, Q, 2, p).holds() ? 0 : 1;
  }
  EXPECT_EQ(violations, 0);
}
