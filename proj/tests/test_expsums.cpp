#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <expsum/expsums.hpp>

using namespace expsum;

namespace {

// Independent oracle: plain double loop with std::polar, no tables.
ComplexVal kloosterman_naive(i64 a, i64 b, i64 q) {
  ComplexVal s{0.0, 0.0};
  for (i64 x = 0; x < q; ++x) {
    if (std::gcd(x, q) != 1) continue;
    i64 xinv = 0;
    for (i64 y = 0; y < q; ++y) {
      if ((x * y) % q == 1 % q) xinv = y;
    }
    const i64 num = ((a % q + q) % q * x + (b % q + q) % q * xinv) % q;
    s += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(q));
  }
  return s;
}

ComplexVal hyper_naive(i64 m, i64 q) {
  ComplexVal s{0.0, 0.0};
  for (i64 x = 0; x < q; ++x) {
    if (std::gcd(x, q) != 1) continue;
    for (i64 y = 0; y < q; ++y) {
      if (std::gcd(y, q) != 1) continue;
      const i64 z = inv_mod(x * y % q, q);
      const i64 num = ((m % q + q) % q * x + y + z) % q;
      s += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(q));
    }
  }
  return s / static_cast<double>(q);
}

}  // namespace

TEST(Kloosterman, DirectExamples) {
  EXPECT_NEAR(kloosterman_direct(1, 1, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(kloosterman_direct(1, 1, 2).real(), 1.0, 1e-15);
  EXPECT_NEAR(kloosterman_direct(1, 1, 5).real(), 2.0 + 2.0 * std::cos(4.0 * std::numbers::pi / 5.0), 1e-12);
  EXPECT_NEAR(kloosterman_direct(1, 1, 5).real(), 0.381966, 1e-6);
}

TEST(Kloosterman, DirectMatchesNaiveOracle) {
  for (i64 q = 1; q <= 60; ++q) {
    for (i64 a = -3; a <= 4; ++a) {
      for (i64 b = 0; b < q; b += 1 + q / 10) {
        ASSERT_LT(std::abs(kloosterman_direct(a, b, q) - kloosterman_naive(a, b, q)), 1e-10 * q) << a << "," << b << "," << q;
      }
    }
  }
}

TEST(Kloosterman, RealAndSymmetric) {
  std::mt19937_64 gen(5);
  for (i64 q = 1; q <= 400; ++q) {
    const i64 a = static_cast<i64>(gen() % 1000), b = static_cast<i64>(gen() % 1000);
    const ComplexVal s = kloosterman_direct(a, b, q);
    ASSERT_LE(std::fabs(s.imag()), 1e-9 * q);
    ASSERT_LT(std::abs(s - kloosterman_direct(b, a, q)), 1e-9 * q);
  }
}

TEST(Kloosterman, ExplicitExamples) {
  EXPECT_EQ(kloosterman_explicit_pp(2, make_prime_power(5, 2)), ComplexVal(0.0, 0.0));
  EXPECT_NEAR(kloosterman_explicit_pp(1, make_prime_power(3, 2)).real(), 6.0 * std::cos(4.0 * std::numbers::pi / 9.0), 1e-12);
  EXPECT_NEAR(kloosterman_explicit_pp(1, make_prime_power(3, 2)).real(), 1.04189, 1e-5);
  EXPECT_NEAR(kloosterman_explicit_pp(1, make_prime_power(5, 2)).real(), 10.0 * std::cos(4.0 * std::numbers::pi / 25.0), 1e-12);
  EXPECT_NEAR(kloosterman_explicit_pp(1, make_prime_power(5, 2)).real(), 8.76307, 1e-5);
  EXPECT_THROW(kloosterman_explicit_pp(1, make_prime_power(5, 1)), BadModulus);
}

TEST(Kloosterman, ExplicitMatchesDirectSmallModuli) {
  for (i64 p : {3, 5, 7, 11, 13}) {
    for (int g = 2;; ++g) {
      const PrimePower pp = make_prime_power(p, g);
      if (pp.q > 3000) break;
      for (i64 beta = 1; beta < pp.q; ++beta) {
        if (beta % p == 0) continue;
        const ComplexVal d = kloosterman_direct(1, beta, pp.q);
        const ComplexVal e = kloosterman_explicit_pp(beta, pp);
        ASSERT_LE(std::abs(e - d), 1e-9 * std::max(1.0, std::abs(d))) << beta << " mod " << pp.q;
        if (legendre(beta, p) == -1) {
          ASSERT_EQ(e, ComplexVal(0.0, 0.0));
        }
      }
    }
  }
}

TEST(Kloosterman, TransformRowMatchesDirect) {
  for (i64 q : {1, 2, 9, 30, 97, 128, 210}) {
    for (i64 a : {1, 2, 5}) {
      const auto row = kloosterman_transform(a, q);
      for (i64 b = 0; b < q; ++b) ASSERT_LT(std::abs(row[static_cast<std::size_t>(b)] - kloosterman_direct(a, b, q)), 1e-9 * q);
    }
  }
}

TEST(Kloosterman, SplitExamples) {
  EXPECT_LT(std::abs(kloosterman_split(1, 1, 15) - kloosterman_direct(1, 1, 15)), 1e-12);
  EXPECT_LT(std::abs(kloosterman_split(1, 0, 6) - kloosterman_direct(1, 0, 6)), 1e-12);
  EXPECT_NEAR(kloosterman_split(1, 0, 6).real(), 1.0, 1e-12);  // Ramanujan sum c_6(1) = mu(6)
  EXPECT_LT(std::abs(kloosterman_split(1, 1, 101) - kloosterman_direct(1, 1, 101)), 1e-12);
}

TEST(Kloosterman, SplitMatchesDirectOnCompositeModuli) {
  std::mt19937_64 gen(11);
  for (i64 q = 4; q <= 3000; ++q) {
    if (is_prime(q)) continue;
    for (int k = 0; k < 20; ++k) {
      const i64 a = static_cast<i64>(gen() % static_cast<u64>(q)), b = static_cast<i64>(gen() % static_cast<u64>(q));
      ASSERT_LT(std::abs(kloosterman_split(a, b, q) - kloosterman_direct(a, b, q)), 1e-9 * q) << a << "," << b << "," << q;
    }
  }
}

TEST(KloosterTable, MethodsAgree) {
  for (i64 q : {27, 125, 343, 60, 221}) {
    const KloosterTable autot(q);
    const KloosterTable direct(q, KloosterMethod::kDirect);
    const KloosterTable fft(q, KloosterMethod::kTransform);
    for (i64 c = 0; c < q; ++c) {
      ASSERT_LT(std::abs(autot[c] - direct[c]), 1e-9 * q);
      ASSERT_LT(std::abs(fft[c] - direct[c]), 1e-9 * q);
    }
  }
}

TEST(HyperKl3, Examples) {
  EXPECT_LT(std::abs(hyper_kl3(1, 1) - ComplexVal(1.0, 0.0)), 1e-15);
  EXPECT_LT(std::abs(hyper_kl3(1, 2) - ComplexVal(-0.5, 0.0)), 1e-15);
  EXPECT_LT(std::abs(hyper_kl3_direct(1, 2) - ComplexVal(-0.5, 0.0)), 1e-15);
  const ComplexVal v = hyper_kl3(2, 7);
  EXPECT_LT(std::abs(v - hyper_naive(2, 7)), 1e-12);
  EXPECT_LE(std::abs(v), 3.0);
}

TEST(HyperKl3, PathsAgreeWithNaiveOracle) {
  for (i64 q = 1; q <= 40; ++q) {
    const HyperKl3Table t(q);
    const auto all = hyper_kl3_direct_all(q);
    for (i64 m = 0; m < q; ++m) {
      const ComplexVal ref = hyper_naive(m, q);
      ASSERT_LT(std::abs(t[m] - ref), 1e-10 * q) << m << " mod " << q;
      ASSERT_LT(std::abs(all[static_cast<std::size_t>(m)] - ref), 1e-10 * q);
      ASSERT_LT(std::abs(hyper_kl3_direct(m, q) - ref), 1e-10 * q);
      ASSERT_LT(std::abs(hyper_kl3(m, q) - ref), 1e-10 * q);
    }
  }
}

TEST(HyperKl3, AllPathsAgreeUpTo500) {
  for (i64 q = 1; q <= 500; ++q) {
    const KloosterTable kt(q);
    const HyperKl3Table t(kt);
    const auto all = hyper_kl3_direct_all(q);
    for (i64 m = 1; m <= q; ++m) {
      const ComplexVal d = all[static_cast<std::size_t>(m % q)];
      ASSERT_LT(std::abs(t.at(m) - d), 1e-9 * q) << m << " mod " << q;
    }
    // the O(q)-per-value path on a few arguments
    for (i64 m : {i64{1}, q / 2 + 1, q}) ASSERT_LT(std::abs(hyper_kl3_fast(m, kt) - all[static_cast<std::size_t>(m % q)]), 1e-9 * q);
  }
}

TEST(HyperKl3, ConjugationUnderNegation) {
  for (i64 q : {7, 9, 35, 128, 243}) {
    const HyperKl3Table t(q);
    for (i64 m = 0; m < q; ++m) ASSERT_LT(std::abs(t.at(-m) - std::conj(t[m])), 1e-12 * q);
  }
}

TEST(HyperKl3, DegenerateIdentity) {
  const IdentityReport r1 = hyper_kl3_degenerate_check(2, 5, 1, 15);
  EXPECT_TRUE(r1.holds) << r1.residual;
  EXPECT_THROW(hyper_kl3_degenerate_check(1, 2, 1, 9), NotDegenerate);
  // d and q/d not coprime: the identity is not stated there
  EXPECT_THROW(hyper_kl3_degenerate_check(1, 3, 1, 9), BadModulus);
}

TEST(HyperKl3, DegenerateIdentityAllSquarefreeSplits) {
  std::mt19937_64 gen(17);
  for (i64 q = 2; q <= 500; ++q) {
    for (i64 d : factorize(q).divisors()) {
      if (d == 1 || std::gcd(d, q / d) != 1) continue;
      for (int k = 0; k < 2; ++k) {
        i64 n = d * (1 + static_cast<i64>(gen() % 50));
        while (std::gcd(n, q) != d) n += d;
        const i64 m = 1 + static_cast<i64>(gen() % 97), b = 1 + static_cast<i64>(gen() % 97);
        const IdentityReport r = hyper_kl3_degenerate_check(m, n, b, q);
        ASSERT_TRUE(r.holds) << "q=" << q << " d=" << d << " n=" << n << " residual " << r.residual;
      }
    }
  }
}

TEST(Weil, AuditSmallRange) {
  const WeilAuditReport rep = weil_audit(50);
  EXPECT_TRUE(rep.ok());
  EXPECT_LE(rep.max_kloosterman_ratio, 1.0);
  EXPECT_LE(rep.max_kl3_abs, 3.0);
  EXPECT_LE(std::abs(kloosterman_direct(1, 1, 3)), 2.0 * std::sqrt(3.0));
}
