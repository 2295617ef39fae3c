#pragma once

// Correlation sums of Kloosterman sums: the prime-power sums C_{gamma,u},
// the prime sum C_{1,1} and its Moebius reduction, the Dabrowski-Fisher
// correlation, the sum calC(n1, n2, m~) and the glued sum C_2. Each sum has
// a brute-force evaluator and, where one exists, a second route through the
// Chinese remainder theorem.
//
// Convention: a Kloosterman factor S(1, inv(A); q) whose argument A is not a
// unit mod q contributes 0. This is the same as dropping the term and keeps
// the CRT factorisations exact.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "arith.hpp"
#include "errors.hpp"
#include "expsums.hpp"
#include "modarith.hpp"
#include "numeric.hpp"

namespace expsum {

struct CharSumParams {
  PrimePower pp;
  int u = 1;
  i64 s1 = 1, t1 = 1, s2 = 1, t2 = 1;
  i64 lam1 = 1, lam2 = 1;
  i64 m = 0;

  void validate() const {
    const i64 p = pp.p;
    if (u < 1 || u > pp.gamma) throw InvalidArgument("need 1 <= u <= gamma");
    for (i64 v : {s1, s2, lam1, lam2}) {
      if (reduce(v, p) == 0) throw InvalidArgument("s_j and lambda_j must be coprime to p");
    }
    if (reduce(t1, p) == 0 || reduce(t2, p) == 0) throw InvalidArgument("t_j must be coprime to p");
  }
};

struct BoundReport {
  ComplexVal sum_value;
  std::optional<ComplexVal> alt_value;  // second evaluation route, when there is one
  double bound_value = 0.0;
  double ratio = 0.0;
  bool vanishing_predicted = false;
  bool vanished = false;
  std::size_t term_count = 0;

  double alt_residual() const { return alt_value ? std::abs(*alt_value - sum_value) : 0.0; }
};

inline BoundReport make_bound_report(ComplexVal sum, double bound, std::size_t terms, bool predicted) {
  BoundReport rep;
  rep.sum_value = sum;
  rep.bound_value = bound;
  rep.term_count = terms;
  rep.vanishing_predicted = predicted;
  rep.vanished = std::abs(sum) <= 1e-6 * static_cast<double>(std::max<std::size_t>(terms, 1));
  if (bound > 0.0) {
    rep.ratio = std::abs(sum) / bound;
  } else {
    rep.ratio = rep.vanished ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return rep;
}

namespace detail {

inline i64 ipow(i64 base, int e) {
  i64 r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// S(1, c * inv(A); q) from a table, or 0 when A is not a unit mod q.
inline ComplexVal kloos_of_inverse(const KloosterTable& table, i64 c, i64 A) {
  const i64 q = table.modulus();
  auto inv = try_inv(A, q);
  if (!inv) return {0.0, 0.0};
  return table[mul_mod(c, *inv, q)];
}

}  // namespace detail

/// sum* over units a1, a2 mod p^u with lam1 inv(a1) - lam2 inv(a2) = m (p^u) of
///   S(1, inv(s1 p^(gamma-u) a1 + t1); p^gamma) conj S(1, inv(s2 p^(gamma-u) a2 + t2); p^gamma).
/// Returns the value and the number of (a1, a2) pairs.
inline std::pair<ComplexVal, std::size_t> frakC_gamma_u_with_count(const CharSumParams& prm, const KloosterTable& table) {
  prm.validate();
  const i64 p = prm.pp.p, q = prm.pp.q;
  if (table.modulus() != q) throw InvalidArgument("table modulus must be p^gamma");
  const i64 pu = detail::ipow(p, prm.u);
  const i64 shift = detail::ipow(p, prm.pp.gamma - prm.u);
  const i64 lam2_inv = inv_mod(prm.lam2, pu);
  KahanSum<ComplexVal> sum;
  std::size_t pairs = 0;
  for (i64 a1 = 1; a1 < pu; ++a1) {
    if (a1 % p == 0) continue;
    const i64 a1_inv = inv_mod(a1, pu);
    const i64 a2_inv = mul_mod(reduce(mul_mod(prm.lam1, a1_inv, pu) - prm.m, pu), lam2_inv, pu);
    if (a2_inv % p == 0) continue;
    const i64 a2 = inv_mod(a2_inv, pu);
    ++pairs;
    const i64 A1 = add_mod(mul_mod(mul_mod(prm.s1, shift, q), a1, q), prm.t1, q);
    const i64 A2 = add_mod(mul_mod(mul_mod(prm.s2, shift, q), a2, q), prm.t2, q);
    sum += detail::kloos_of_inverse(table, 1, A1) * std::conj(detail::kloos_of_inverse(table, 1, A2));
  }
  return {sum.value(), pairs};
}

inline ComplexVal frakC_gamma_u(const CharSumParams& prm, const KloosterTable& table) {
  return frakC_gamma_u_with_count(prm, table).first;
}

inline ComplexVal frakC_gamma_u(const CharSumParams& prm) { return frakC_gamma_u(prm, KloosterTable(prm.pp.q)); }

struct PPowerReport {
  BoundReport report;
  char regime = 'A';  // 'A': square-root bound with p^nu(m); 'B': vanishing criterion
  int nu = 0;
  // Bit k set when sign combination k of (t1^(-3/2), t2^(-3/2)) satisfies the
  // congruence: k = 0 (+,+), 1 (+,-), 2 (-,+), 3 (-,-). Regime B only.
  unsigned branch_mask = 0;
};

/// Decides which regime of the prime-power correlation bound applies,
/// evaluates the bound and (in regime B) the vanishing criterion
///   t1^(-3/2) s1 lam1 = t2^(-3/2) s2 lam2 (mod p^(gamma-u))
/// over all square-root branches, and compares with the brute-force sum.
inline PPowerReport ppower_bound(const CharSumParams& prm, const KloosterTable& table) {
  prm.validate();
  const i64 p = prm.pp.p;
  const int gamma = prm.pp.gamma, u = prm.u;
  if (gamma <= 1) throw HypothesisViolated("gamma must exceed 1");
  if (5 * u > 4 * gamma) throw HypothesisViolated("u must satisfy u <= 4 gamma / 5");
  if (prm.m == 0) throw HypothesisViolated("m must be nonzero");
  if (p == 2) throw HypothesisViolated("(2 t_j, p) = 1 requires p odd");

  PPowerReport out;
  const int r = gamma - u;
  out.nu = valuation(prm.m, p).nu;
  const bool nonresidue = legendre(prm.t1, p) != 1 || legendre(prm.t2, p) != 1;
  const auto [value, pairs] = frakC_gamma_u_with_count(prm, table);

  double bound = 0.0;
  bool predicted = nonresidue;
  if (2 * r > u || out.nu < r) {
    out.regime = 'A';
    const double eps = (u % 2 == 0) ? 0.0 : 1.0;
    bound = std::pow(static_cast<double>(p), gamma + 0.5 * u + 0.5 * eps + out.nu);
  } else {
    out.regime = 'B';
    if (!nonresidue) {
      const PrimePower ppr = make_prime_power(p, r);
      const i64 qr = ppr.q;
      auto weight = [&](i64 t, i64 s, i64 lam) {
        const i64 ell = sqrt_mod_pp(Residue{t, qr}, ppr)->first;
        const i64 ell_inv = inv_mod(ell, qr);
        return mul_mod(mul_mod(pow_mod(ell_inv, 3, qr), s, qr), lam, qr);
      };
      const i64 w1 = weight(prm.t1, prm.s1, prm.lam1);
      const i64 w2 = weight(prm.t2, prm.s2, prm.lam2);
      const i64 signs[2] = {1, -1};
      for (int k = 0; k < 4; ++k) {
        const i64 lhs = reduce(signs[k >> 1] * w1, qr);
        const i64 rhs = reduce(signs[k & 1] * w2, qr);
        if (lhs == rhs) out.branch_mask |= 1U << k;
      }
      predicted = out.branch_mask == 0;
    }
    bound = predicted ? 0.0 : std::pow(static_cast<double>(p), gamma + u);
  }
  out.report = make_bound_report(value, bound, pairs, predicted);
  return out;
}

inline PPowerReport ppower_bound(const CharSumParams& prm) { return ppower_bound(prm, KloosterTable(prm.pp.q)); }

/// 2x2 matrix over Z/p acting on P^1 by fractional linear transformations.
struct Mat2 {
  i64 a = 1, b = 0, c = 0, d = 1;
  i64 p = 2;

  friend bool operator==(const Mat2&, const Mat2&) = default;

  i64 det() const { return reduce(a * d - b * c, p); }

  Mat2 operator*(const Mat2& o) const {
    return {reduce(a * o.a + b * o.c, p), reduce(a * o.b + b * o.d, p), reduce(c * o.a + d * o.c, p),
            reduce(c * o.b + d * o.d, p), p};
  }

  Mat2 scaled(i64 k) const { return {mul_mod(a, k, p), mul_mod(b, k, p), mul_mod(c, k, p), mul_mod(d, k, p), p}; }

  /// (a x + b) / (c x + d) for finite x; nullopt stands for the point at infinity.
  std::optional<i64> apply(i64 x) const {
    const i64 num = reduce(a * x + b, p);
    const i64 den = reduce(c * x + d, p);
    if (den == 0) return std::nullopt;
    return mul_mod(num, inv_mod(den, p), p);
  }

  /// Image of the point at infinity: a / c.
  std::optional<i64> apply_infinity() const {
    if (c == 0) return std::nullopt;
    return mul_mod(a, inv_mod(c, p), p);
  }

  bool is_scalar() const { return reduce(a - d, p) == 0 && b == 0 && c == 0; }
};

/// delta2 delta3 delta1^(-1) mod p, where delta1 = [0 1; s1 t1], delta2 = [0 1; s2 t2],
/// delta3 = [lam2 0; -m lam1]. delta3 maps a1 to the a2 paired with it, and delta_j
/// maps a_j to inv(s_j a_j + t_j).
inline Mat2 moebius_reduce(i64 s1, i64 t1, i64 s2, i64 t2, i64 lam1, i64 lam2, i64 m, i64 p) {
  if (!is_prime(p)) throw InvalidArgument("p must be prime");
  const Mat2 delta1{0, 1, reduce(s1, p), reduce(t1, p), p};
  const Mat2 delta2{0, 1, reduce(s2, p), reduce(t2, p), p};
  const Mat2 delta3{reduce(lam2, p), 0, reduce(-m, p), reduce(lam1, p), p};
  if (delta1.det() == 0 || delta2.det() == 0 || delta3.det() == 0) {
    throw SingularTransform("s1 s2 lam1 lam2 must be coprime to p");
  }
  const Mat2 adj1{delta1.d, reduce(-delta1.b, p), reduce(-delta1.c, p), delta1.a, p};
  return (delta2 * delta3 * adj1).scaled(inv_mod(delta1.det(), p));
}

/// sum* over units x mod p of S(1, x; p) conj S(1, M(x); p), with S(1, infinity) := 0.
inline ComplexVal moebius_correlation(const Mat2& M, const KloosterTable& table) {
  KahanSum<ComplexVal> sum;
  for (i64 x = 1; x < M.p; ++x) {
    const auto y = M.apply(x);
    if (!y) continue;
    sum += table[x] * std::conj(table[*y]);
  }
  return sum.value();
}

namespace detail {

inline ComplexVal frakC11_direct(i64 p, i64 s1, i64 t1, i64 s2, i64 t2, i64 lam1, i64 lam2, i64 m,
                                 const KloosterTable& table) {
  CharSumParams prm{make_prime_power(p, 1), 1, s1, t1, s2, t2, lam1, lam2, m};
  return frakC_gamma_u(prm, table);
}

}  // namespace detail

/// C_{1,1} through the Moebius reduction. Substituting x = delta1(a1) runs x over
/// delta1(P^1 minus {inf, -t1/s1}) rather than over the (a1, a2) pairs of the
/// direct sum, so two boundary terms are removed:
///   a1 = 0:          S(1, inv(t1)) conj S(1, inv(t2)),
///   a1 = lam1/m:     S(1, delta1(lam1/m)) conj S(1, 0)   (m != 0 only).
inline ComplexVal frakC_11_via_moebius(i64 p, i64 s1, i64 t1, i64 s2, i64 t2, i64 lam1, i64 lam2, i64 m,
                                       const KloosterTable& table) {
  const Mat2 M = moebius_reduce(s1, t1, s2, t2, lam1, lam2, m, p);
  ComplexVal value = moebius_correlation(M, table);
  value -= table[inv_mod(t1, p)] * std::conj(table[inv_mod(t2, p)]);
  if (reduce(m, p) != 0) {
    const i64 a1 = mul_mod(lam1, inv_mod(m, p), p);
    value -= detail::kloos_of_inverse(table, 1, add_mod(mul_mod(s1, a1, p), t1, p)) * std::conj(table[0]);
  }
  return value;
}

/// C_{1,1} by brute force against p^(3/2) + p^2 delta, where delta requires
/// m = 0, t1 = t2 and lam1 s1 = lam2 s2 (mod p). alt_value holds the
/// Moebius-reduced evaluation.
inline BoundReport frakC_11(i64 p, i64 s1, i64 t1, i64 s2, i64 t2, i64 lam1, i64 lam2, i64 m) {
  if (!is_prime(p) || p == 2) throw InvalidArgument("p must be an odd prime");
  const KloosterTable table(p);
  CharSumParams prm{make_prime_power(p, 1), 1, s1, t1, s2, t2, lam1, lam2, m};
  const auto [value, pairs] = frakC_gamma_u_with_count(prm, table);
  const bool delta = reduce(m, p) == 0 && reduce(t1 - t2, p) == 0 && reduce(lam1 * s1 - lam2 * s2, p) == 0;
  const double pd = static_cast<double>(p);
  BoundReport rep = make_bound_report(value, std::pow(pd, 1.5) + (delta ? pd * pd : 0.0), pairs, false);
  rep.alt_value = frakC_11_via_moebius(p, s1, t1, s2, t2, lam1, lam2, m, table);
  return rep;
}

/// sum* over units x mod p^gamma of S(1, x) conj S(1, a x inv(b x + 1)), skipping x
/// with b x + 1 not a unit; bound p^(3 gamma/2) p^(min(gamma, nu(a-1), nu(b))/2).
inline BoundReport df_correlation(i64 a, i64 b, const PrimePower& pp, const KloosterTable& table) {
  const i64 p = pp.p, q = pp.q;
  if (reduce(a, p) == 0) throw InvalidArgument("a must be a unit mod p");
  if (table.modulus() != q) throw InvalidArgument("table modulus must be p^gamma");
  KahanSum<ComplexVal> sum;
  std::size_t terms = 0;
  for (i64 x = 1; x < q; ++x) {
    if (x % p == 0) continue;
    const i64 y = add_mod(mul_mod(b, x, q), 1, q);
    auto y_inv = try_inv(y, q);
    if (!y_inv) continue;
    ++terms;
    sum += table[x] * std::conj(table[mul_mod(mul_mod(a, x, q), *y_inv, q)]);
  }
  const int e = std::min({pp.gamma, valuation_capped(a - 1, p, pp.gamma), valuation_capped(b, p, pp.gamma)});
  const double bound = std::pow(static_cast<double>(p), 1.5 * pp.gamma + 0.5 * e);
  return make_bound_report(sum.value(), bound, terms, false);
}

inline BoundReport df_correlation(i64 a, i64 b, const PrimePower& pp) {
  return df_correlation(a, b, pp, KloosterTable(pp.q));
}

namespace detail {

// sum* over units x mod q of S(1, c inv(x); q) conj S(1, c inv(n1 inv(n2) x + inv(n2 b) m~); q).
inline std::pair<ComplexVal, std::size_t> calC_local(i64 n1, i64 n2, i64 mtil, i64 b, i64 c, const KloosterTable& table) {
  const i64 q = table.modulus();
  const i64 n2_inv = inv_mod(n2, q);
  const i64 slope = mul_mod(n1, n2_inv, q);
  const i64 offset = mul_mod(inv_mod(mul_mod(n2, b, q), q), reduce(mtil, q), q);
  KahanSum<ComplexVal> sum;
  std::size_t terms = 0;
  for (i64 x = 0; x < q; ++x) {
    auto x_inv = try_inv(x, q);
    if (!x_inv) continue;
    ++terms;
    const i64 y = add_mod(mul_mod(slope, x, q), offset, q);
    sum += table[mul_mod(c, *x_inv, q)] * std::conj(kloos_of_inverse(table, c, y));
  }
  return {sum.value(), terms};
}

}  // namespace detail

/// calC(n1, n2, m~) = sum* over units x mod q of S(1, inv(x); q) conj S(1, inv(n1 inv(n2) x + inv(n2 b) m~); q)
/// against q^(3/2) sum_{k | q} k^(1/2) delta(n1 = n2 (k), m~ = 0 (k)). alt_value is the
/// product of the local sums over the prime-power factors of q.
inline BoundReport calC(i64 n1, i64 n2, i64 mtil, i64 b, i64 q) {
  if (q < 1) throw InvalidArgument("modulus must be >= 1");
  if (std::gcd(static_cast<i64>(static_cast<i128>(reduce(n1, q)) * reduce(n2, q) % q * reduce(b, q) % q), q) != 1 && q > 1) {
    throw InvalidArgument("need gcd(n1 n2 b, q) = 1");
  }
  const KloosterTable table(q);
  const auto [value, terms] = detail::calC_local(n1, n2, mtil, b, 1, table);

  ComplexVal crt{1.0, 0.0};
  for (const PrimePower& part : factorize(q).prime_powers()) {
    const i64 c = pow_mod(inv_mod((q / part.q) % part.q, part.q), 2, part.q);
    crt *= detail::calC_local(n1, n2, mtil, b, c, KloosterTable(part.q)).first;
  }

  double weight = 0.0;
  for (i64 k : factorize(q).divisors()) {
    if (reduce(n1 - n2, k) == 0 && reduce(mtil, k) == 0) weight += std::sqrt(static_cast<double>(k));
  }
  BoundReport rep = make_bound_report(value, std::pow(static_cast<double>(q), 1.5) * weight, terms, false);
  rep.alt_value = crt;
  return rep;
}

struct GlueParams {
  i64 d = 1, q = 1;
  i64 n1 = 1, n2 = 1, c1 = 1, c2 = 1, l1 = 1, l2 = 1;
  i64 m2 = 1, m3 = 1, m4 = 0;
  i64 b = 1;
};

namespace detail {

// sum* sum* over units a1, a2 mod k with c2 inv(a1) - c1 inv(a2) = m4 (k) of
//   S(1, w1 inv(m2 + a1 h l1); k') conj S(1, w2 inv(m3 + a2 h l2); k'),
// where the Kloosterman modulus k' is table.modulus() and h = q/d.
inline std::pair<ComplexVal, std::size_t> glue_local(const GlueParams& g, i64 k, i64 w1, i64 w2, const KloosterTable& table) {
  const i64 kq = table.modulus();
  const i64 h = g.q / g.d;
  const i64 c1_inv = inv_mod(g.c1, k);
  KahanSum<ComplexVal> sum;
  std::size_t terms = 0;
  for (i64 a1 : units_mod(k)) {
    const i64 a1_inv = inv_mod(a1, k);
    const i64 a2_inv = mul_mod(reduce(mul_mod(g.c2, a1_inv, k) - g.m4, k), c1_inv, k);
    auto a2 = try_inv(a2_inv, k);
    if (!a2) continue;
    ++terms;
    const i64 A1 = reduce(g.m2 + static_cast<i64>(static_cast<i128>(a1) * h % kq * reduce(g.l1, kq) % kq), kq);
    const i64 A2 = reduce(g.m3 + static_cast<i64>(static_cast<i128>(*a2) * h % kq * reduce(g.l2, kq) % kq), kq);
    sum += kloos_of_inverse(table, w1, A1) * std::conj(kloos_of_inverse(table, w2, A2));
  }
  return {sum.value(), terms};
}

}  // namespace detail

/// C_2 = d sum* sum* over units a1, a2 mod d with c2 inv(a1) - c1 inv(a2) = m4 (d) of
///   S(1, c1 n1 b inv(m2 + a1 (q/d) l1); q) conj S(1, c2 n2 b inv(m3 + a2 (q/d) l2); q),
/// against q d^(3/2) sum_{k | d} k^(1/2) delta_k with delta_k requiring m4 = 0,
/// n1 c1 m3 = n2 c2 m2 and n1 c1^2 l2 = n2 c2^2 l1 (mod k). For square-free q,
/// alt_value is the factorisation into the q/d part and one local sum per prime of d.
inline BoundReport frakC2_glue(const GlueParams& g) {
  if (g.d < 1 || g.q < 1 || g.q % g.d != 0) throw InvalidArgument("need d | q");
  const Factorization fd = factorize(g.d);
  if (!fd.squarefree()) throw NotSquareFree("d = " + std::to_string(g.d));
  for (i64 v : {g.c1, g.c2, g.l1, g.l2}) {
    if (std::gcd(v, g.q) != 1) throw InvalidArgument("c_i and l_j must be coprime to q");
  }
  const i64 q = g.q;
  const KloosterTable table(q);
  const i64 w1 = mul_mod(mul_mod(g.c1, g.n1, q), g.b, q);
  const i64 w2 = mul_mod(mul_mod(g.c2, g.n2, q), g.b, q);
  const auto [inner, terms] = detail::glue_local(g, g.d, w1, w2, table);
  const ComplexVal value = static_cast<double>(g.d) * inner;

  double weight = 0.0;
  for (i64 k : fd.divisors()) {
    const bool active = reduce(g.m4, k) == 0 &&
                        reduce(static_cast<i64>((static_cast<i128>(g.n1) * g.c1 * g.m3 - static_cast<i128>(g.n2) * g.c2 * g.m2) % k), k) == 0 &&
                        reduce(static_cast<i64>((static_cast<i128>(g.n1) * g.c1 * g.c1 * g.l2 - static_cast<i128>(g.n2) * g.c2 * g.c2 * g.l1) % k), k) == 0;
    if (active) weight += std::sqrt(static_cast<double>(k));
  }
  const double bound = static_cast<double>(q) * std::pow(static_cast<double>(g.d), 1.5) * weight;
  BoundReport rep = make_bound_report(value, bound, terms, false);

  if (factorize(q).squarefree()) {
    const i64 r = q / g.d;
    ComplexVal crt{static_cast<double>(g.d), 0.0};
    if (r > 1) {
      const KloosterTable rt(r);
      const i64 dd = pow_mod(inv_mod(g.d % r, r), 2, r);
      crt *= detail::kloos_of_inverse(rt, mul_mod(dd, w1, r), g.m2) *
             std::conj(detail::kloos_of_inverse(rt, mul_mod(dd, w2, r), g.m3));
    }
    for (const auto& [prime, e] : fd.factors()) {
      const KloosterTable local(prime);
      const i64 c = pow_mod(inv_mod((q / prime) % prime, prime), 2, prime);
      crt *= detail::glue_local(g, prime, mul_mod(c, w1, prime), mul_mod(c, w2, prime), local).first;
    }
    rep.alt_value = crt;
  }
  return rep;
}

}  // namespace expsum
