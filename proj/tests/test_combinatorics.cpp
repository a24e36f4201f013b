#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "spikelab/combinatorics.hpp"

using namespace spikelab;

TEST(Catalan, Values) {
  EXPECT_EQ(catalan(0), 1);
  EXPECT_EQ(catalan(4), 14);
  EXPECT_EQ(catalan(12), 208012);
  const CatalanTable table(30);
  EXPECT_TRUE(table.satisfies_recurrence());
  for (int l = 0; l <= 30; ++l) EXPECT_EQ(table[l], oracle::catalan_closed(l));
}

TEST(Convolutions, Examples) {
  for (int l = 0; l <= 10; ++l) EXPECT_EQ(sigma_conv(l, 1), catalan(l));
  EXPECT_EQ(sigma_conv(2, 2), 5);
  for (int s = 1; s <= 6; ++s) EXPECT_EQ(sigma_conv(0, s), 1);
  EXPECT_EQ(positive_conv(3, 2), 4);
  for (int s = 1; s <= 6; ++s) EXPECT_EQ(positive_conv(s, s), 1);
  EXPECT_EQ(positive_conv(5, 1), 42);
  EXPECT_EQ(positive_conv(2, 3), 0);
  EXPECT_THROW(sigma_conv(-1, 1), InvalidArgument);
  EXPECT_THROW(sigma_conv(2, 0), InvalidArgument);
}

TEST(Convolutions, MatchBruteForce) {
  for (int l = 0; l <= 9; ++l)
    for (int s = 1; s <= 5; ++s) {
      EXPECT_EQ(sigma_conv(l, s), oracle::convolution_brute(l, s, 0)) << l << "," << s;
      EXPECT_EQ(positive_conv(l, s), oracle::convolution_brute(l, s, 1)) << l << "," << s;
    }
}

TEST(PositiveCompositions, Grid) {
  EXPECT_TRUE(verify_lemma4(2, 1));
  for (int s = 1; s <= 14; ++s) EXPECT_TRUE(verify_lemma4(s, s));
  for (int l = 1; l <= 14; ++l)
    for (int s = 1; s <= l; ++s) EXPECT_TRUE(verify_lemma4(l, s)) << l << "," << s;
  EXPECT_THROW(verify_lemma4(2, 3), InvalidArgument);
}

TEST(RTail, ExactValues) {
  EXPECT_EQ(r_tail_exact(0), Rational(2));
  EXPECT_EQ(r_tail_exact(1), Rational(1));
  EXPECT_EQ(r_tail_exact(2), Rational(3, 4));
  for (int l = 0; l < 40; ++l) EXPECT_GT(r_tail_exact(l), r_tail_exact(l + 1));
}

TEST(RTail, SeriesBracketsExactValue) {
  for (int l : {0, 1, 2, 5, 20, 100}) {
    const RTail r = r_tail(l);
    EXPECT_LE(r.partial_sum, r.value() * (1 + 1e-12));
    EXPECT_GE(r.partial_sum + r.remainder_bound, r.value());
  }
}

TEST(ConvolutionBounds, Examples) {
  const auto a = verify_lemma78(5, 2);
  EXPECT_TRUE(a.upper_holds);
  EXPECT_TRUE(a.lower_checked);
  EXPECT_TRUE(a.lower_holds);
  const auto b = verify_lemma78(3, 3);
  EXPECT_FALSE(b.lower_checked);
  EXPECT_TRUE(b.upper_holds);
}

TEST(ConvolutionBounds, ZeroConventionFailsAtOneTwo) {
  // sigma(1,2) = 2 while 2^-2 C_3 (1 + 0)(1 + r(1)/2) = 15/8.
  const auto rep = verify_lemma78(1, 2, RZeroConvention::Zero);
  EXPECT_EQ(rep.sigma, 2);
  EXPECT_EQ(rep.upper_bound, Rational(15, 8));
  EXPECT_FALSE(rep.upper_holds);
}

TEST(ConvolutionBounds, RawSeriesConventionHoldsOnGrid) {
  for (int l = 1; l <= 14; ++l)
    for (int s = 1; s <= 12; ++s) EXPECT_TRUE(verify_lemma78(l, s, RZeroConvention::RawSeries).holds()) << l << "," << s;
}

TEST(ConvolutionBounds, LowerBoundHoldsOnGrid) {
  for (int l = 1; l <= 14; ++l)
    for (int s = 1; s < l && s <= 12; ++s) EXPECT_TRUE(verify_lemma78(l, s).lower_holds) << l << "," << s;
}

TEST(CycleClasses, SmallTables) {
  const auto t1 = enumerate_cycle_classes(1);
  EXPECT_EQ(t1.class_count, 1);
  EXPECT_EQ(t1.at(1), 1);
  EXPECT_EQ(t1.at(2), 1);
  const auto t2 = enumerate_cycle_classes(2);
  EXPECT_EQ(t2.class_count, 2);
  EXPECT_EQ(t2.at(1), 3);
  EXPECT_EQ(t2.at(2), 2);
  EXPECT_EQ(t2.at(3), 1);
  EXPECT_EQ(enumerate_cycle_classes(5).class_count, 42);
  EXPECT_THROW(enumerate_cycle_classes(13), InvalidArgument);
  EXPECT_THROW(enumerate_cycle_classes(0), InvalidArgument);
}

TEST(CycleClasses, AggregateInvariants) {
  for (int l = 1; l <= 12; ++l) {
    const auto t = enumerate_cycle_classes(l);
    const BigInt C = catalan(l);
    EXPECT_EQ(t.class_count, C);
    EXPECT_EQ(t.vertex_total(), C * (l + 1));
    EXPECT_EQ(t.position_total(), C * (2 * l + 1));
  }
}

TEST(CycleClasses, MatchBitStringEnumeration) {
  for (int l = 1; l <= 9; ++l) {
    const auto t = enumerate_cycle_classes(l);
    const auto ref = oracle::btable_brute(l);
    for (int k = 1; k <= l + 1; ++k) {
      const auto it = ref.find(k);
      EXPECT_EQ(t.at(k), it == ref.end() ? BigInt(0) : it->second) << l << "," << k;
    }
  }
}

TEST(BSizes, Examples) {
  const auto t1 = enumerate_cycle_classes(1);
  EXPECT_TRUE(binomial(1, 1) <= t1.at(2) * 4);
  const auto t2 = enumerate_cycle_classes(2);
  EXPECT_TRUE(binomial(4, 2) <= t2.at(1) * 8);
  for (int l = 1; l <= 12; ++l) EXPECT_TRUE(verify_bsizes(l).holds) << l;
}

TEST(S1, HandDerivedValues) {
  for (const Rational& th : {Rational(1, 2), Rational(1), Rational(3)}) {
    EXPECT_EQ(s1_exact(th, 1), 0);
    EXPECT_EQ(s1_exact(th, 2), th * th);
    EXPECT_EQ(s1_exact(th, 3), th * th * th * th + 3 * th * th);
  }
}

TEST(S1, MatchesDirectEnumeration) {
  for (const Rational& th : {Rational(1, 3), Rational(2), Rational(5, 2)})
    for (int p = 1; p <= 8; ++p) EXPECT_EQ(s1_exact(th, p), oracle::s1_direct(th, p)) << p;
}

TEST(S1, LogModeAgreesWithExact) {
  const S1LogTable table(40);
  for (double th : {0.5, 1.0, 1.5, 3.0})
    for (int p = 2; p <= 40; ++p) {
      const double exact = std::log(static_cast<double>(s1_exact(Rational(th), p)));
      EXPECT_NEAR(table.log_s1(th, p), exact, 1e-10 * std::abs(exact) + 1e-12) << th << "," << p;
    }
}

TEST(S1, LogModeReachesLargeP) {
  const S1LogTable table(1000);
  const double lv = table.log_s1(0.5, 1000);
  EXPECT_TRUE(std::isfinite(lv));
  EXPECT_GT(lv, 0.0);
  EXPECT_NEAR(table.log_positive_conv(7, 3), std::log(static_cast<double>(positive_conv(7, 3))), 1e-12);
}

TEST(S2, DirectEnumerationGivesFourThetaSquared) {
  // Terms at p = 2: (t,q) = (1,0): 1, (2,0): 2, (2,1): 1, with b_{1,1} = b_{1,2} = 1.
  for (const Rational& th : {Rational(1, 2), Rational(1), Rational(3)}) {
    EXPECT_EQ(oracle::s2_direct(th, 2), 4 * th * th);
    EXPECT_EQ(s2_exact(th, 2, cycle_class_tables(1)), 4 * th * th);
  }
}

TEST(S2, MatchesDirectEnumeration) {
  const auto tables = cycle_class_tables(7);
  for (const Rational& th : {Rational(1, 2), Rational(2)})
    for (int p = 1; p <= 8; ++p) EXPECT_EQ(s2_exact(th, p, tables), oracle::s2_direct(th, p)) << p;
}

TEST(S2, Properties) {
  const auto tables = cycle_class_tables(12);
  for (int p = 2; p <= 13; ++p) EXPECT_EQ(s2_exact(0, p, tables), 0);
  for (double th : {0.5, 1.0, 2.0, 3.0}) {
    double prev = 0.0;
    for (int p = 2; p <= 13; ++p) {
      const double root = std::exp(std::log(static_cast<double>(s2_exact(Rational(th), p, tables))) / (2.0 * p));
      EXPECT_GE(root, prev - 1e-12) << th << "," << p;
      const double f = th < 1.0 ? 2.0 : th + 1.0 / th;
      EXPECT_LT(root, f + 1.0);
      prev = root;
    }
  }
}

TEST(S2, EstimateBeyondCap) {
  const SumValue v = s2(1.5, 20);
  EXPECT_TRUE(v.estimate);
  EXPECT_TRUE(std::isfinite(v.log_value));
  const SumValue w = s2(1.5, 5);
  EXPECT_FALSE(w.estimate);
  EXPECT_EQ(w.exact, s2_exact(Rational(1.5), 5, cycle_class_tables(4)));
}

TEST(SOfM, HandDerivedValue) {
  for (const Rational& M : {Rational(1, 2), Rational(1), Rational(3)}) {
    EXPECT_EQ(oracle::s_of_M_direct(2, M), M * M * M * M + 4 * M * M);
    EXPECT_EQ(s_of_M_exact(2, M, cycle_class_tables(1)), M * M * M * M + 4 * M * M);
  }
}

TEST(SOfM, MatchesDirectEnumerationAndTrends) {
  const auto tables = cycle_class_tables(11);
  for (int p = 1; p <= 8; ++p) EXPECT_EQ(s_of_M_exact(p, Rational(3), tables), oracle::s_of_M_direct(p, Rational(3)));
  for (int p = 1; p <= 12; ++p) EXPECT_EQ(s_of_M_exact(p, 0, tables), 0);
  double prev = 0.0;
  for (int p = 1; p <= 12; ++p) {
    const double root = std::pow(static_cast<double>(s_of_M_exact(p, Rational(3), tables)), 1.0 / p);
    EXPECT_GE(root, prev);
    EXPECT_LT(root, 100.0 / 9.0 + 1e-9);
    prev = root;
  }
}
