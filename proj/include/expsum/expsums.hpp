#pragma once

// Kloosterman sums S(a, b; q), their explicit evaluation modulo odd prime
// powers, twisted multiplicativity, and normalised hyper-Kloosterman sums
//   Kl3~(m, q) = (1/q) sum*_{x, y mod q} e((m x + y + inv(x y)) / q).

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "arith.hpp"
#include "errors.hpp"
#include "fft.hpp"
#include "modarith.hpp"
#include "numeric.hpp"

namespace expsum {

namespace detail {

// S(a, b; q) given inverse and root tables for q.
inline ComplexVal kloosterman_with(i64 a, i64 b, i64 q, const std::vector<i64>& inv, const RootTable& roots) {
  if (q == 1) return {1.0, 0.0};
  const i64 ar = reduce(a, q), br = reduce(b, q);
  KahanSum<ComplexVal> sum;
  for (i64 x = 1; x < q; ++x) {
    const i64 xinv = inv[static_cast<std::size_t>(x)];
    if (xinv == 0) continue;
    const i64 phase = static_cast<i64>((static_cast<i128>(ar) * x + static_cast<i128>(br) * xinv) % q);
    sum += roots[phase];
  }
  return sum.value();
}

}  // namespace detail

/// S(a, b; q) by the defining O(q) loop over units x.
inline ComplexVal kloosterman_direct(i64 a, i64 b, i64 q) {
  if (q < 1) throw InvalidArgument("modulus must be >= 1");
  if (q == 1) return {1.0, 0.0};
  KahanSum<ComplexVal> sum;
  for (i64 x = 1; x < q; ++x) {
    auto xinv = try_inv(x, q);
    if (!xinv) continue;
    const i64 phase = add_mod(mul_mod(a, x, q), mul_mod(b, *xinv, q), q);
    sum += unit_root(phase, q);
  }
  return sum.value();
}

/// S(a, b; q) for every b in [0, q) at once. S(a, b; q) = sum_y e(a inv(y)/q) e(b y/q)
/// over units y, which is one length-q DFT.
inline std::vector<ComplexVal> kloosterman_transform(i64 a, i64 q) {
  if (q < 1) throw InvalidArgument("modulus must be >= 1");
  std::vector<ComplexVal> f(static_cast<std::size_t>(q), ComplexVal{});
  if (q == 1) return {ComplexVal{1.0, 0.0}};
  for (i64 y = 1; y < q; ++y) {
    if (auto yinv = try_inv(y, q)) f[static_cast<std::size_t>(y)] = unit_root(mul_mod(a, *yinv, q), q);
  }
  return dft_positive(std::move(f));
}

/// S(1, beta; p^gamma) for gamma >= 2, p odd, p not dividing beta:
///   0 if (beta/p) = -1, else 2 (l/p)^gamma p^(gamma/2) Re[eps_q e(2 l / q)]
/// with l^2 = beta and eps_q = 1 or i according as q = 1 or 3 mod 4.
inline ComplexVal kloosterman_explicit_pp(i64 beta, const PrimePower& pp) {
  if (pp.gamma < 2 || pp.p == 2) {
    throw BadModulus("explicit evaluation needs gamma >= 2 and p odd (p=" + std::to_string(pp.p) +
                     ", gamma=" + std::to_string(pp.gamma) + ")");
  }
  const i64 q = pp.q;
  const Residue b{beta, q};
  if (b.value % pp.p == 0) throw NonInvertible("beta must be coprime to p");
  auto roots = sqrt_mod_pp(b, pp);
  if (!roots) return {0.0, 0.0};
  const i64 ell = roots->first;
  const int chi = (legendre(ell, pp.p) == 1 || pp.gamma % 2 == 0) ? 1 : -1;
  const double angle = kTwoPi * (static_cast<double>(mul_mod(2, ell, q)) / static_cast<double>(q));
  const double re_part = (q % 4 == 1) ? std::cos(angle) : -std::sin(angle);
  const double scale = std::pow(static_cast<double>(pp.p), 0.5 * pp.gamma);
  return {2.0 * chi * scale * re_part, 0.0};
}

enum class KloosterMethod { kAuto, kDirect, kExplicit, kTransform };

/// values[c] = S(1, c; q) for c in [0, q).
class KloosterTable {
 public:
  KloosterTable() = default;

  explicit KloosterTable(i64 q, KloosterMethod method = KloosterMethod::kAuto) : q_(q) {
    if (q < 1) throw InvalidArgument("modulus must be >= 1");
    const auto pp = as_prime_power(q);
    const bool explicit_ok = pp && pp->gamma >= 2 && pp->p != 2;
    if (method == KloosterMethod::kAuto) {
      method = explicit_ok ? KloosterMethod::kExplicit : (q <= 2048 ? KloosterMethod::kDirect : KloosterMethod::kTransform);
    }
    values_.assign(static_cast<std::size_t>(q), ComplexVal{});
    switch (method) {
      case KloosterMethod::kExplicit: {
        if (!explicit_ok) throw BadModulus("explicit table requires an odd prime power with gamma >= 2");
        // p | c: S(1, c; p^gamma) = 0 for gamma >= 2.
        for (i64 c = 0; c < q; ++c) {
          if (c % pp->p != 0) values_[static_cast<std::size_t>(c)] = kloosterman_explicit_pp(c, *pp);
        }
        break;
      }
      case KloosterMethod::kDirect: {
        const auto inv = inverse_table(q);
        const RootTable roots(q);
        for (i64 c = 0; c < q; ++c) values_[static_cast<std::size_t>(c)] = detail::kloosterman_with(1, c, q, inv, roots);
        break;
      }
      case KloosterMethod::kTransform:
        values_ = kloosterman_transform(1, q);
        break;
      case KloosterMethod::kAuto:
        break;
    }
  }

  i64 modulus() const { return q_; }
  const ComplexVal& operator[](i64 c) const { return values_[static_cast<std::size_t>(c)]; }
  ComplexVal at(i64 c) const { return values_[static_cast<std::size_t>(reduce(c, q_))]; }
  const std::vector<ComplexVal>& values() const { return values_; }

 private:
  i64 q_ = 1;
  std::vector<ComplexVal> values_{ComplexVal{1.0, 0.0}};
};

/// S(a, b; q) as a product over the prime-power factors q_i of q:
///   S(a, b; q) = prod_i S(a r_i', b r_i'; q_i),  r_i = q / q_i,  r_i' = inv(r_i) mod q_i.
inline ComplexVal kloosterman_split(i64 a, i64 b, i64 q) {
  if (q < 1) throw InvalidArgument("modulus must be >= 1");
  if (q == 1) return {1.0, 0.0};
  ComplexVal product{1.0, 0.0};
  for (const PrimePower& part : factorize(q).prime_powers()) {
    const i64 rest_inv = inv_mod((q / part.q) % part.q, part.q);
    product *= kloosterman_direct(mul_mod(a, rest_inv, part.q), mul_mod(b, rest_inv, part.q), part.q);
  }
  return product;
}

/// Kl3~(m, q) by the defining double sum. The phases are counted exactly in
/// integers, so the only rounding happens in the final O(q) contraction.
inline ComplexVal hyper_kl3_direct(i64 m, i64 q) {
  if (q < 1) throw InvalidArgument("modulus must be >= 1");
  if (q == 1) return {1.0, 0.0};
  const auto inv = inverse_table(q);
  const i64 mr = reduce(m, q);
  std::vector<i64> counts(static_cast<std::size_t>(q), 0);
  for (i64 x = 1; x < q; ++x) {
    if (inv[static_cast<std::size_t>(x)] == 0) continue;
    const i64 mx = static_cast<i64>((static_cast<i128>(mr) * x) % q);
    i64 xy = 0;
    for (i64 y = 1; y < q; ++y) {
      xy += x;
      if (xy >= q) xy -= q;
      const i64 xy_inv = inv[static_cast<std::size_t>(xy)];
      if (inv[static_cast<std::size_t>(y)] == 0) continue;
      i64 r = mx + y + xy_inv;
      if (r >= q) r -= q;
      if (r >= q) r -= q;
      ++counts[static_cast<std::size_t>(r)];
    }
  }
  const RootTable roots(q);
  KahanSum<ComplexVal> sum;
  for (i64 r = 0; r < q; ++r) {
    if (counts[static_cast<std::size_t>(r)] != 0) sum += static_cast<double>(counts[static_cast<std::size_t>(r)]) * roots[r];
  }
  return sum.value() / static_cast<double>(q);
}

/// Kl3~(m, q) for every m in [0, q) by exact phase counting. For each unit x,
/// T_x[s] = #{units y : y + inv(xy) = s}; then the phase count for m at r is
/// sum_x T_x[r - m x]. Cost O(q^3) additions, no Kloosterman sums involved.
inline std::vector<ComplexVal> hyper_kl3_direct_all(i64 q) {
  if (q < 1) throw InvalidArgument("modulus must be >= 1");
  if (q == 1) return {ComplexVal{1.0, 0.0}};
  const auto inv = inverse_table(q);
  const auto n = static_cast<std::size_t>(q);
  std::vector<i64> units;
  for (i64 x = 1; x < q; ++x) {
    if (inv[static_cast<std::size_t>(x)] != 0) units.push_back(x);
  }
  // T stored twice over so that T_x[(r - mx) mod q] is a contiguous window.
  std::vector<std::vector<std::uint32_t>> T;
  T.reserve(units.size());
  for (i64 x : units) {
    std::vector<std::uint32_t> row(2 * n, 0);
    for (i64 y : units) {
      const i64 s = (y + inv[static_cast<std::size_t>(mul_mod(x, y, q))]) % q;
      ++row[static_cast<std::size_t>(s)];
    }
    std::copy(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n), row.begin() + static_cast<std::ptrdiff_t>(n));
    T.push_back(std::move(row));
  }
  const RootTable roots(q);
  std::vector<ComplexVal> out(n);
  std::vector<std::uint64_t> counts(n);
  for (i64 m = 0; m < q; ++m) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t k = 0; k < units.size(); ++k) {
      // counts[r] += T_x[(r - m x) mod q] = row[r + q - mx]
      const std::size_t shift = n - static_cast<std::size_t>(mul_mod(m, units[k], q));
      const std::uint32_t* src = T[k].data() + (shift == n ? 0 : shift);
      for (std::size_t r = 0; r < n; ++r) counts[r] += src[r];
    }
    KahanSum<ComplexVal> sum;
    for (i64 r = 0; r < q; ++r) {
      if (counts[static_cast<std::size_t>(r)] != 0) sum += static_cast<double>(counts[static_cast<std::size_t>(r)]) * roots[r];
    }
    out[static_cast<std::size_t>(m)] = sum.value() / static_cast<double>(q);
  }
  return out;
}

/// Kl3~(m, q) = (1/q) sum*_x e(m x / q) S(1, inv(x); q).
inline ComplexVal hyper_kl3_fast(i64 m, const KloosterTable& table) {
  const i64 q = table.modulus();
  if (q == 1) return {1.0, 0.0};
  const i64 mr = reduce(m, q);
  KahanSum<ComplexVal> sum;
  for (i64 x = 1; x < q; ++x) {
    auto xinv = try_inv(x, q);
    if (!xinv) continue;
    sum += unit_root(mul_mod(mr, x, q), q) * table[*xinv];
  }
  return sum.value() / static_cast<double>(q);
}

inline ComplexVal hyper_kl3(i64 m, i64 q) { return hyper_kl3_fast(m, KloosterTable(q)); }

/// values[r] = Kl3~(r, q) for r in [0, q), via one DFT of x -> S(1, inv(x); q).
class HyperKl3Table {
 public:
  HyperKl3Table() = default;

  explicit HyperKl3Table(i64 q) : HyperKl3Table(KloosterTable(q)) {}

  explicit HyperKl3Table(const KloosterTable& table) : q_(table.modulus()) {
    const i64 q = q_;
    if (q == 1) {
      values_ = {ComplexVal{1.0, 0.0}};
      return;
    }
    std::vector<ComplexVal> f(static_cast<std::size_t>(q), ComplexVal{});
    for (i64 x = 1; x < q; ++x) {
      if (auto xinv = try_inv(x, q)) f[static_cast<std::size_t>(x)] = table[*xinv];
    }
    values_ = dft_positive(std::move(f));
    for (auto& v : values_) v /= static_cast<double>(q);
  }

  i64 modulus() const { return q_; }
  const ComplexVal& operator[](i64 r) const { return values_[static_cast<std::size_t>(r)]; }
  ComplexVal at(i64 r) const { return values_[static_cast<std::size_t>(reduce(r, q_))]; }
  const std::vector<ComplexVal>& values() const { return values_; }

  double max_abs() const {
    double best = 0.0;
    for (const auto& v : values_) best = std::max(best, std::abs(v));
    return best;
  }

 private:
  i64 q_ = 1;
  std::vector<ComplexVal> values_{ComplexVal{1.0, 0.0}};
};

/// Outcome of checking an identity between two independently evaluated sides.
struct IdentityReport {
  ComplexVal lhs;
  ComplexVal rhs;
  double residual = 0.0;
  double tolerance = 0.0;
  bool holds = false;
  // The variant with factor d/q and a single inv(d), kept for comparison.
  ComplexVal uncorrected_rhs;
  bool uncorrected_holds = false;
};

/// For d = gcd(n, q) > 1 with gcd(d, q/d) = 1, checks
///   Kl3~(m n b, q) = (mu(d)^2 / d) Kl3~(m (n/d) b inv(d)^2, q/d),
/// with inv(d) taken mod q/d; both sides by the direct double sum. The
/// variant (d/q) Kl3~(m (n/d) b inv(d), q/d) is evaluated alongside.
inline IdentityReport hyper_kl3_degenerate_check(i64 m, i64 n, i64 b, i64 q, double tol = 1e-9) {
  const i64 d = std::gcd(n, q);
  if (d == 1) throw NotDegenerate("gcd(n, q) = 1");
  const i64 r = q / d;
  if (std::gcd(d, r) != 1) {
    throw BadModulus("gcd(n, q) = " + std::to_string(d) + " shares a factor with q/d; inv(d) mod q/d does not exist");
  }
  const i64 d_inv = inv_mod(d % r, r);
  const i64 reduced_arg = mul_mod(mul_mod(reduce(m, r), reduce(n / d, r), r), mul_mod(reduce(b, r), d_inv, r), r);

  IdentityReport rep;
  rep.lhs = hyper_kl3_direct(static_cast<i64>((static_cast<i128>(reduce(m, q)) * reduce(n, q) % q) * reduce(b, q) % q), q);
  const int mu = mobius(d);
  rep.rhs = (static_cast<double>(mu * mu) / static_cast<double>(d)) * hyper_kl3_direct(mul_mod(reduced_arg, d_inv, r), r);
  rep.uncorrected_rhs = (static_cast<double>(d) / static_cast<double>(q)) * hyper_kl3_direct(reduced_arg, r);
  rep.residual = std::abs(rep.lhs - rep.rhs);
  rep.tolerance = tol;
  rep.holds = rep.residual <= tol;
  rep.uncorrected_holds = std::abs(rep.lhs - rep.uncorrected_rhs) <= tol;
  return rep;
}

struct WeilAuditReport {
  i64 prime_bound = 0;
  double max_kloosterman_ratio = 0.0;  // max |S(a, b; p)| / (2 sqrt p)
  i64 worst_kloosterman_prime = 0;
  double max_kl3_abs = 0.0;  // max |Kl3~(m, p)|
  i64 worst_kl3_prime = 0;
  bool ok() const { return max_kloosterman_ratio <= 1.0 + 1e-12 && max_kl3_abs <= 3.0 + 1e-12; }
};

/// Exhaustive check of |S(a, b; p)| <= 2 sqrt(p) over all units a, b and of
/// |Kl3~(m, p)| <= 3 over all units m, for every prime p <= prime_bound.
inline WeilAuditReport weil_audit(i64 prime_bound) {
  WeilAuditReport rep;
  rep.prime_bound = prime_bound;
  for (i64 p = 2; p <= prime_bound; ++p) {
    if (!is_prime(p)) continue;
    const auto inv = inverse_table(p);
    const RootTable roots(p);
    const double weil = 2.0 * std::sqrt(static_cast<double>(p));
    for (i64 a = 1; a < p; ++a) {
      for (i64 b = 1; b < p; ++b) {
        const double ratio = std::abs(detail::kloosterman_with(a, b, p, inv, roots)) / weil;
        if (ratio > rep.max_kloosterman_ratio) {
          rep.max_kloosterman_ratio = ratio;
          rep.worst_kloosterman_prime = p;
        }
      }
    }
    const auto kl3 = hyper_kl3_direct_all(p);
    for (i64 m = 1; m < p; ++m) {
      const double value = std::abs(kl3[static_cast<std::size_t>(m)]);
      if (value > rep.max_kl3_abs) {
        rep.max_kl3_abs = value;
        rep.worst_kl3_prime = p;
      }
    }
  }
  return rep;
}

}  // namespace expsum
