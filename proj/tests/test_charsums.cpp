#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <expsum/charsums.hpp>
#include <expsum/scans.hpp>

using namespace expsum;

namespace {

ComplexVal kloos_naive(i64 b, i64 q) {
  ComplexVal s{0.0, 0.0};
  for (i64 x = 1; x < q; ++x) {
    const auto xi = try_inv(x, q);
    if (!xi) continue;
    s += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((x + b * *xi) % q) / static_cast<double>(q));
  }
  return s;
}

// Kloosterman factor at inv(v): zero when v is not a unit.
ComplexVal factor(i64 v, i64 q) {
  const auto vi = try_inv(reduce(v, q), q);
  return vi ? kloos_naive(*vi, q) : ComplexVal{0.0, 0.0};
}

// Plain double loop over all pairs of units (a1, a2) mod p^u.
ComplexVal frakC_oracle(const CharSumParams& c) {
  const i64 q = c.pp.q;
  i64 pu = 1, shift = 1;
  for (int i = 0; i < c.u; ++i) pu *= c.pp.p;
  for (int i = 0; i < c.pp.gamma - c.u; ++i) shift *= c.pp.p;
  ComplexVal s{0.0, 0.0};
  for (i64 a1 = 1; a1 < std::max<i64>(pu, 2); ++a1) {
    if (std::gcd(a1, pu) != 1) continue;
    for (i64 a2 = 1; a2 < std::max<i64>(pu, 2); ++a2) {
      if (std::gcd(a2, pu) != 1) continue;
      if (reduce(c.lam1 * inv_mod(a1, pu) - c.lam2 * inv_mod(a2, pu) - c.m, pu) != 0) continue;
      s += factor(c.s1 * shift % q * a1 + c.t1, q) * std::conj(factor(c.s2 * shift % q * a2 + c.t2, q));
    }
  }
  return s;
}

CharSumParams params(i64 p, int g, int u, i64 s1, i64 t1, i64 s2, i64 t2, i64 l1, i64 l2, i64 m) {
  return CharSumParams{make_prime_power(p, g), u, s1, t1, s2, t2, l1, l2, m};
}

}  // namespace

TEST(FrakCGammaU, MatchesDoubleLoopOracle) {
  std::mt19937_64 gen(21);
  for (i64 p : {3, 5, 7}) {
    for (int g = 2; g <= 4; ++g) {
      if (make_prime_power(p, g).q > 400) break;
      for (int u = 1; u <= g; ++u) {
        for (int k = 0; k < 4; ++k) {
          auto unit = [&] {
            i64 x;
            do x = 1 + static_cast<i64>(gen() % 60); while (x % p == 0);
            return x;
          };
          const auto c = params(p, g, u, unit(), unit(), unit(), unit(), unit(), unit(), static_cast<i64>(gen() % 50));
          ASSERT_LT(std::abs(frakC_gamma_u(c) - frakC_oracle(c)), 1e-8 * static_cast<double>(c.pp.q)) << p << "^" << g << " u=" << u;
        }
      }
    }
  }
}

TEST(FrakCGammaU, NonResidueTVanishes) {
  // (2/5) = -1, so every Kloosterman factor on the left vanishes
  const auto c = params(5, 3, 2, 1, 2, 1, 1, 1, 1, 1);
  EXPECT_LT(std::abs(frakC_gamma_u(c)), 1e-9);
}

TEST(FrakCGammaU, CaseAExample) {
  const auto c = params(5, 3, 2, 1, 1, 1, 1, 1, 1, 1);
  const PPowerReport r = ppower_bound(c);
  EXPECT_EQ(r.regime, 'A');
  EXPECT_EQ(r.nu, 0);
  EXPECT_DOUBLE_EQ(r.report.bound_value, std::pow(5.0, 4.0));
  EXPECT_LE(r.report.ratio, 16.0);
}

TEST(FrakCGammaU, RealForSymmetricSmallCase) {
  const ComplexVal v = frakC_gamma_u(params(3, 2, 1, 1, 1, 1, 1, 1, 1, 0));
  EXPECT_LT(std::fabs(v.imag()), 1e-9);
}

TEST(FrakCGammaU, ConjugationSymmetry) {
  std::mt19937_64 gen(4);
  for (int k = 0; k < 40; ++k) {
    const i64 p = (k % 2) ? 3 : 5;
    const int g = 2 + static_cast<int>(gen() % 3);
    const int u = 1 + static_cast<int>(gen() % static_cast<u64>(g));
    auto unit = [&] {
      i64 x;
      do x = 1 + static_cast<i64>(gen() % 200); while (x % p == 0);
      return x;
    };
    const auto c = params(p, g, u, unit(), unit(), unit(), unit(), unit(), unit(), static_cast<i64>(gen() % 300));
    auto swapped = params(p, g, u, c.s2, c.t2, c.s1, c.t1, c.lam2, c.lam1, -c.m);
    ASSERT_LT(std::abs(frakC_gamma_u(swapped) - std::conj(frakC_gamma_u(c))), 1e-9 * static_cast<double>(c.pp.q * c.pp.q));
  }
}

TEST(PPowerBound, CaseBIdenticalSidesDoesNotPredictVanishing) {
  const auto c = params(3, 5, 4, 1, 1, 1, 1, 1, 1, 9);
  const PPowerReport r = ppower_bound(c);
  EXPECT_EQ(r.regime, 'B');
  EXPECT_FALSE(r.report.vanishing_predicted);
  EXPECT_DOUBLE_EQ(r.report.bound_value, std::pow(3.0, 9.0));
  EXPECT_LE(std::abs(r.report.sum_value), std::pow(3.0, 9.0));
}

TEST(PPowerBound, CaseBCongruenceModuloThreeAlwaysHasABranch) {
  // With p = 3 and gamma - u = 1 every unit is +-1 mod 3, so some sign choice
  // of the square roots satisfies the congruence: vanishing is not predicted,
  // although the brute-force sum does vanish here.
  const auto c = params(3, 5, 4, 1, 1, 2, 1, 1, 1, 9);
  const PPowerReport r = ppower_bound(c);
  EXPECT_EQ(r.regime, 'B');
  EXPECT_NE(r.branch_mask, 0u);
  EXPECT_FALSE(r.report.vanishing_predicted);
  EXPECT_TRUE(r.report.vanished);
}

TEST(PPowerBound, PredictedVanishingHoldsOverScan) {
  PPowerScanSpec spec;
  spec.gamma_max = 5;
  spec.samples = 60;
  long predicted = 0;
  for (const auto& row : ppower_scan(spec)) {
    const auto& rep = row.result.report;
    if (row.result.regime == 'B' && rep.vanishing_predicted) {
      ++predicted;
      ASSERT_LE(std::abs(rep.sum_value), 1e-6 * std::pow(static_cast<double>(row.params.pp.p), 2 * row.params.u));
    }
    if (rep.bound_value > 0) {
      ASSERT_LE(rep.ratio, 16.0);
    }
  }
  EXPECT_GT(predicted, 0);
}

TEST(PPowerBound, HypothesisChecks) {
  EXPECT_THROW(ppower_bound(params(5, 1, 1, 1, 1, 1, 1, 1, 1, 1)), HypothesisViolated);
  EXPECT_THROW(ppower_bound(params(5, 4, 4, 1, 1, 1, 1, 1, 1, 1)), HypothesisViolated);
  EXPECT_THROW(ppower_bound(params(5, 4, 2, 1, 1, 1, 1, 1, 1, 0)), HypothesisViolated);
  EXPECT_THROW(params(5, 3, 2, 5, 1, 1, 1, 1, 1, 1).validate(), InvalidArgument);
}

TEST(FrakC11, DeltaCases) {
  const BoundReport active = frakC_11(7, 1, 1, 1, 1, 1, 1, 0);
  EXPECT_DOUBLE_EQ(active.bound_value, std::pow(7.0, 1.5) + 49.0);
  EXPECT_LE(active.ratio, 16.0);
  const BoundReport inactive = frakC_11(7, 1, 1, 1, 1, 1, 1, 1);
  EXPECT_DOUBLE_EQ(inactive.bound_value, std::pow(7.0, 1.5));
  const BoundReport other = frakC_11(5, 1, 1, 1, 2, 1, 1, 0);
  EXPECT_DOUBLE_EQ(other.bound_value, std::pow(5.0, 1.5));
}

TEST(FrakC11, MoebiusRouteMatchesDirect) {
  std::mt19937_64 gen(8);
  for (i64 p = 3; p <= 31; ++p) {
    if (!is_prime(p)) continue;
    for (int k = 0; k < 50; ++k) {
      auto unit = [&] { return 1 + static_cast<i64>(gen() % static_cast<u64>(p - 1)); };
      const i64 m = (k % 3 == 0) ? 0 : static_cast<i64>(gen() % static_cast<u64>(p));
      const BoundReport r = frakC_11(p, unit(), unit(), unit(), unit(), unit(), unit(), m);
      ASSERT_LE(r.alt_residual(), 1e-6 * static_cast<double>(p * p));
      ASSERT_LE(r.ratio, 16.0);
    }
  }
}

TEST(MoebiusReduce, Examples) {
  const Mat2 scalar = moebius_reduce(1, 1, 1, 1, 1, 1, 0, 5);
  EXPECT_TRUE(scalar.is_scalar());
  const Mat2 general = moebius_reduce(1, 1, 1, 1, 1, 1, 1, 5);
  EXPECT_FALSE(general.is_scalar());
  const KloosterTable t(5);
  EXPECT_LT(std::abs(frakC_11_via_moebius(5, 1, 1, 1, 1, 1, 1, 1, t) - frakC_gamma_u(params(5, 1, 1, 1, 1, 1, 1, 1, 1, 1))), 1e-9);
  EXPECT_THROW(moebius_reduce(0, 1, 1, 1, 1, 1, 0, 5), SingularTransform);
}

TEST(MoebiusReduce, MatrixActsAsComposition) {
  // the image of 1/(2 a1 + 3) is 1/(4 a2 + 5), where 6/a1 - 8 = 7/a2
  const i64 p = 11;
  const Mat2 M = moebius_reduce(2, 3, 4, 5, 6, 7, 8, p);
  for (i64 a1 = 1; a1 < p; ++a1) {
    const i64 x = reduce(2 * a1 + 3, p);
    if (x == 0) continue;
    const i64 xi = inv_mod(x, p);  // delta1(a1)
    const i64 rhs_den = reduce(6 * inv_mod(a1, p) - 8, p);
    if (rhs_den == 0) continue;
    const i64 a2v = mul_mod(7, inv_mod(rhs_den, p), p);  // lam1/a1 - lam2/a2 = m
    const i64 y = reduce(4 * a2v + 5, p);
    const auto img = M.apply(xi);
    if (y == 0) {
      EXPECT_FALSE(img.has_value());
    } else {
      ASSERT_TRUE(img.has_value());
      EXPECT_EQ(*img, inv_mod(y, p));
    }
  }
}

TEST(DabrowskiFisher, ClosedFormSpotValue) {
  const BoundReport r = df_correlation(1, 0, make_prime_power(5, 1));
  EXPECT_NEAR(r.sum_value.real(), 19.0, 1e-6);
  EXPECT_NEAR(r.sum_value.imag(), 0.0, 1e-6);
  EXPECT_DOUBLE_EQ(r.bound_value, 25.0);
}

TEST(DabrowskiFisher, ClosedFormAllSmallPrimes) {
  // sum* |S(1, x; p)|^2 = p (p - 1) - |S(1, 0; p)|^2 = p^2 - p - 1
  for (i64 p : {3, 5, 7, 11, 13, 17, 19, 23}) {
    EXPECT_NEAR(df_correlation(1, 0, make_prime_power(p, 1)).sum_value.real(), static_cast<double>(p * p - p - 1), 1e-8);
  }
}

TEST(DabrowskiFisher, RatiosOverFamily) {
  std::vector<PrimePower> mods{make_prime_power(3, 2), make_prime_power(5, 1), make_prime_power(5, 2), make_prime_power(7, 2)};
  for (const auto& row : df_scan(mods, 40, 1)) ASSERT_LE(row.report.ratio, 16.0);
  EXPECT_LE(df_correlation(2, 1, make_prime_power(5, 1)).ratio, 16.0);
  EXPECT_LE(df_correlation(1, 0, make_prime_power(3, 2)).ratio, 16.0);
}

TEST(CalC, Examples) {
  const BoundReport maximal = calC(1, 1, 0, 1, 7);
  EXPECT_DOUBLE_EQ(maximal.bound_value, std::pow(7.0, 1.5) * (1.0 + std::sqrt(7.0)));
  EXPECT_LE(maximal.ratio, 16.0);
  const BoundReport generic = calC(1, 2, 1, 1, 7);
  EXPECT_DOUBLE_EQ(generic.bound_value, std::pow(7.0, 1.5));
  const BoundReport comp = calC(2, 7, 3, 4, 15);
  EXPECT_LE(comp.alt_residual(), 1e-9 * 225);
}

TEST(CalC, CrtMatchesDirectForSquarefreeAndPrimePowers) {
  std::mt19937_64 gen(13);
  for (i64 q = 2; q <= 200; ++q) {
    if (!factorize(q).squarefree() && !as_prime_power(q)) continue;
    for (int k = 0; k < 2; ++k) {
      auto unit = [&] {
        i64 x;
        do x = 1 + static_cast<i64>(gen() % static_cast<u64>(q)); while (std::gcd(x, q) != 1);
        return x;
      };
      const i64 n1 = unit(), n2 = k ? n1 : unit();
      const BoundReport r = calC(n1, n2, k ? 0 : static_cast<i64>(gen() % static_cast<u64>(q)), unit(), q);
      ASSERT_LE(r.alt_residual(), 1e-6 * static_cast<double>(q * q)) << q;
    }
  }
}

TEST(Glue, Examples) {
  GlueParams g;
  g.d = 1;
  g.q = 7;
  g.m2 = 2;
  g.m3 = 3;
  const BoundReport trivial = frakC2_glue(g);
  EXPECT_EQ(trivial.term_count, 1u);
  EXPECT_TRUE(std::isfinite(trivial.ratio));

  GlueParams sym;
  sym.d = sym.q = 15;
  sym.m2 = sym.m3 = 2;
  sym.m4 = 0;
  const BoundReport all = frakC2_glue(sym);
  const double full = 15.0 * std::pow(15.0, 1.5) * (1 + std::sqrt(3.0) + std::sqrt(5.0) + std::sqrt(15.0));
  EXPECT_NEAR(all.bound_value, full, 1e-9 * full);
  EXPECT_LE(all.alt_residual(), 1e-6 * 225);

  GlueParams generic;
  generic.d = 3;
  generic.q = 15;
  generic.n1 = 1;
  generic.n2 = 2;
  generic.m2 = 1;
  generic.m3 = 2;
  generic.m4 = 1;
  EXPECT_NEAR(frakC2_glue(generic).bound_value, 15.0 * std::pow(3.0, 1.5), 1e-9);

  GlueParams bad = generic;
  bad.d = 9;
  bad.q = 45;
  EXPECT_THROW(frakC2_glue(bad), NotSquareFree);
}

TEST(Glue, ScanCrtAndRatios) {
  std::vector<i64> moduli;
  for (i64 q = 2; q <= 80; ++q) moduli.push_back(q);
  for (const auto& r : glue_scan(moduli, 2, 5)) {
    ASSERT_LE(r.report.alt_residual(), 1e-6 * static_cast<double>(r.g.q * r.g.q));
    ASSERT_LE(r.report.ratio, 16.0);
  }
}
