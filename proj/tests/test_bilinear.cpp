#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <expsum/bilinear.hpp>
#include <expsum/scans.hpp>

using namespace expsum;

namespace {

BilinearConfig config(i64 q, i64 b, i64 M, i64 N) {
  BilinearConfig c;
  c.q = q;
  c.b = b;
  c.M = M;
  c.N = N;
  return c;
}

std::vector<ComplexVal> random_alpha(i64 N, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> r(0.0, 1.0), ang(0.0, 6.283185307179586);
  std::vector<ComplexVal> a;
  for (i64 k = 0; k < N; ++k) a.push_back(std::polar(r(gen), ang(gen)));
  return a;
}

}  // namespace

TEST(Bilinear, ModulusOneIsAProduct) {
  BilinearConfig c = config(1, 1, 40, 5);
  c.s1 = {0.1, 0.0};
  c.w = {0.02, 0.01};
  ComplexVal m_sum{0.0, 0.0};
  const ComplexVal order = c.s1 - 2.0 * c.w;
  for (i64 m = 41; m < 80; ++m) {
    ComplexVal sigma{0.0, 0.0};
    for (i64 d = 1; d <= m; ++d) {
      if (m % d == 0) sigma += std::pow(ComplexVal(static_cast<double>(d), 0.0), order);
    }
    m_sum += sigma * bilinear_weight()(static_cast<double>(m) / 40.0);
  }
  EXPECT_LT(std::abs(bilinear_sum(c) - 5.0 * m_sum), 1e-10 * std::abs(m_sum));
  EXPECT_LT(std::abs(bilinear_grouped(c) - 5.0 * m_sum), 1e-10 * std::abs(m_sum));
}

TEST(Bilinear, EmptySupportGivesZero) {
  EXPECT_EQ(bilinear_sum(config(7, 1, 0, 3)), ComplexVal(0.0, 0.0));
  EXPECT_EQ(bilinear_grouped(config(7, 1, 1, 3)), ComplexVal(0.0, 0.0));
}

TEST(Bilinear, SingleSumAndGroupedPathAgree) {
  for (i64 q : {7, 27, 101, 210}) {
    const auto c = config(q, 1, q, 1);
    const ComplexVal s = bilinear_sum(c);
    EXPECT_LE(std::abs(s - bilinear_grouped(c)), 1e-9 * std::abs(s));
  }
  const auto c = config(27, 2, 54, 3);
  const CancellationReport r = cancellation_report(c);
  EXPECT_LE(r.path_residual(), 1e-9 * std::abs(r.sum_value));
  EXPECT_TRUE(r.within_trivial());
}

TEST(Bilinear, Validation) {
  EXPECT_THROW(bilinear_sum(config(9, 3, 10, 2)), NonCoprime);
  auto c = config(7, 1, 10, 2);
  c.alpha = {1.0, 2.0};
  EXPECT_THROW(bilinear_sum(c), InvalidArgument);
  c.alpha = {1.0};
  EXPECT_THROW(bilinear_sum(c), InvalidArgument);
}

TEST(Bilinear, LinearityInAlpha) {
  std::mt19937_64 gen(2);
  for (i64 q : {7, 49, 120}) {
    auto c = config(q, 1, 2 * q, 6);
    c.alpha = random_alpha(6, gen);
    for (auto& a : c.alpha) a *= 0.5;
    const ComplexVal s = bilinear_sum(c);
    auto doubled = c;
    for (auto& a : doubled.alpha) a *= 2.0;
    EXPECT_EQ(bilinear_sum(doubled), 2.0 * s);
  }
}

TEST(Bilinear, ConjugationUnderNegatedB) {
  std::mt19937_64 gen(6);
  for (i64 q : {7, 27, 100}) {
    auto c = config(q, 11, q + 5, 4);
    c.alpha = random_alpha(4, gen);
    c.s1 = {0.05, 0.02};
    c.s2 = {-0.03, 0.04};
    c.w = {0.01, -0.01};
    auto conj = c;
    conj.b = -c.b;
    for (auto& a : conj.alpha) a = std::conj(a);
    conj.s1 = std::conj(c.s1);
    conj.s2 = std::conj(c.s2);
    conj.w = std::conj(c.w);
    EXPECT_LT(std::abs(bilinear_sum(conj) - std::conj(bilinear_sum(c))), 1e-10 * std::abs(bilinear_sum(c)));
  }
}

TEST(ThmBound, Values) {
  EXPECT_NEAR(thm_bound(BoundKind::kAlt, 1, 1, 1), 1.0 + std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(thm_bound(BoundKind::kSquarefree, 1, 1, 1), 2.0 + 2.0 * std::sqrt(2.0), 1e-15);
  const double g = 2.0;
  const double pp = std::pow(3.0, 7.0 / 12.0) * std::cbrt(27.0) * std::sqrt(27.0) * std::pow(3.0, 5.0 / 6.0) * std::pow(g, 2.0 / 3.0) +
                    std::pow(27.0, 0.65) * 3.0;
  EXPECT_NEAR(thm_bound(BoundKind::kPrimePower, 27, 27, 3, 3), pp, 1e-12 * pp);
  EXPECT_THROW(thm_bound(BoundKind::kAlt, 0, 1, 1), InvalidArgument);
}

TEST(Cancellation, ModulusOneHasExponentOne) {
  const CancellationReport r = cancellation_report(config(1, 1, 50, 4));
  EXPECT_NEAR(r.exponent, 1.0, 1e-12);
  EXPECT_TRUE(r.within_trivial());
}

TEST(Cancellation, PrimeModulusShowsCancellation) {
  const CancellationReport r = cancellation_report(config(1009, 1, 1009, 1));
  EXPECT_LT(r.exponent, 1.0);
  EXPECT_TRUE(r.hyp_squarefree);
}

TEST(Cancellation, HypothesisFlags) {
  const CancellationReport sq = cancellation_report(config(210, 1, 10, 3));
  EXPECT_TRUE(sq.hyp_squarefree);
  EXPECT_FALSE(sq.hyp_primepower);
  const CancellationReport pp = cancellation_report(config(343, 1, 10, 3));
  EXPECT_TRUE(pp.hyp_primepower);
  EXPECT_FALSE(pp.hyp_squarefree);
  const CancellationReport none = cancellation_report(config(343, 1, 10, 20));
  EXPECT_FALSE(none.hypothesis_ok());
}

TEST(Cancellation, GridPathsAndTrivialBound) {
  const auto rows = bilinear_scan(bilinear_grid(bilinear_grid_moduli(true), 1));
  EXPECT_EQ(rows.size(), 25u);
  for (const auto& row : rows) {
    ASSERT_LE(row.report.path_residual(), 1e-9 * std::abs(row.report.sum_value));
    ASSERT_TRUE(row.report.within_trivial());
  }
  EXPECT_EQ(bilinear_grid(bilinear_grid_moduli(false), 1).size(), 50u);
}
