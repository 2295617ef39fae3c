#pragma once

// Exact modular and p-adic arithmetic on machine integers. Every modulus in
// scope is below 2^62; products go through 128-bit intermediates.

#include <algorithm>
#include <cassert>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace expsum {

/// A residue class value mod modulus, always stored reduced.
struct Residue {
  i64 value = 0;
  i64 modulus = 1;

  Residue() = default;
  Residue(i64 v, i64 q) : value(0), modulus(q) {
    if (q < 1) throw InvalidArgument("modulus must be >= 1, got " + std::to_string(q));
    value = reduce(v, q);
  }

  friend bool operator==(const Residue&, const Residue&) = default;
};

/// q = p^gamma with p prime.
struct PrimePower {
  i64 p = 3;
  int gamma = 1;
  i64 q = 3;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// n = p^nu * unit with p not dividing unit.
struct Valuation {
  int nu = 0;
  i64 unit = 1;

  friend bool operator==(const Valuation&, const Valuation&) = default;
};

inline i64 mul_mod(i64 a, i64 b, i64 q) {
  return static_cast<i64>(reduce(static_cast<i64>((static_cast<i128>(a) * b) % q), q));
}

inline i64 add_mod(i64 a, i64 b, i64 q) { return reduce(reduce(a, q) + reduce(b, q), q); }

inline i64 pow_mod(i64 a, u64 e, i64 q) {
  i64 base = reduce(a, q);
  i64 result = 1 % q;
  while (e > 0) {
    if (e & 1U) result = mul_mod(result, base, q);
    base = mul_mod(base, base, q);
    e >>= 1U;
  }
  return result;
}

inline Residue mod_pow(const Residue& a, u64 e) { return {pow_mod(a.value, e, a.modulus), a.modulus}; }

/// Inverse of a mod q when gcd(a, q) = 1.
inline std::optional<i64> try_inv(i64 a, i64 q) {
  i64 old_r = reduce(a, q), r = q;
  i64 old_s = 1, s = 0;
  while (r != 0) {
    const i64 quot = old_r / r;
    old_r -= quot * r;
    std::swap(old_r, r);
    old_s -= quot * s;
    std::swap(old_s, s);
  }
  if (old_r != 1) {
    if (q == 1) return 0;
    return std::nullopt;
  }
  return reduce(old_s, q);
}

inline i64 inv_mod(i64 a, i64 q) {
  auto inv = try_inv(a, q);
  if (!inv) throw NonInvertible(std::to_string(a) + " mod " + std::to_string(q));
  return *inv;
}

inline Residue mod_inv(const Residue& a) { return {inv_mod(a.value, a.modulus), a.modulus}; }

inline bool coprime(i64 a, i64 b) { return std::gcd(a, b) == 1; }

/// Unique residue modulo the product congruent to every part.
inline Residue crt_combine(std::span<const Residue> parts) {
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      if (!coprime(parts[i].modulus, parts[j].modulus)) {
        throw ModuliNotCoprime(std::to_string(parts[i].modulus) + " and " +
                               std::to_string(parts[j].modulus));
      }
    }
  }
  Residue acc{0, 1};
  for (const Residue& part : parts) {
    // acc.value + acc.modulus * k = part.value (mod part.modulus)
    const i64 m = part.modulus;
    const i64 k = mul_mod(reduce(part.value - acc.value, m), inv_mod(acc.modulus % m, m), m);
    const i64 combined = acc.modulus * m;
    acc = Residue{acc.value + acc.modulus * k, combined};
  }
  return acc;
}

inline Residue crt_combine(std::initializer_list<Residue> parts) {
  return crt_combine(std::span<const Residue>(parts.begin(), parts.size()));
}

inline bool is_prime(i64 n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (i64 d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

inline PrimePower make_prime_power(i64 p, int gamma) {
  if (!is_prime(p)) throw InvalidArgument(std::to_string(p) + " is not prime");
  if (gamma < 1) throw InvalidArgument("exponent must be >= 1");
  i64 q = 1;
  for (int i = 0; i < gamma; ++i) {
    if (q > (i64{1} << 62) / p) throw InvalidArgument("prime power overflows 62 bits");
    q *= p;
  }
  return {p, gamma, q};
}

/// If n = p^gamma for a prime p and gamma >= 1, return it.
inline std::optional<PrimePower> as_prime_power(i64 n) {
  if (n < 2) return std::nullopt;
  i64 p = 0;
  for (i64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      p = d;
      break;
    }
  }
  if (p == 0) return PrimePower{n, 1, n};
  int gamma = 0;
  i64 m = n;
  while (m % p == 0) {
    m /= p;
    ++gamma;
  }
  if (m != 1) return std::nullopt;
  return PrimePower{p, gamma, n};
}

/// Legendre symbol (a/p) for an odd prime p.
inline int legendre(i64 a, i64 p) {
  const i64 r = reduce(a, p);
  if (r == 0) return 0;
  return pow_mod(r, static_cast<u64>((p - 1) / 2), p) == 1 ? 1 : -1;
}

inline Valuation valuation(i64 n, i64 p) {
  if (n == 0) throw ZeroInput("valuation of 0");
  Valuation v{0, n};
  while (v.unit % p == 0) {
    v.unit /= p;
    ++v.nu;
  }
  return v;
}

/// nu_p(n) with nu_p(0) = +infinity represented by `cap`; the result never exceeds cap.
inline int valuation_capped(i64 n, i64 p, int cap) {
  if (n == 0) return cap;
  return std::min(valuation(n, p).nu, cap);
}

namespace detail {

// Tonelli-Shanks for an odd prime p and a quadratic residue a (a != 0 mod p).
inline i64 sqrt_mod_prime(i64 a, i64 p) {
  a = reduce(a, p);
  if (p % 4 == 3) return pow_mod(a, static_cast<u64>((p + 1) / 4), p);
  i64 q = p - 1;
  int s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  i64 z = 2;
  while (legendre(z, p) != -1) ++z;
  i64 c = pow_mod(z, static_cast<u64>(q), p);
  i64 x = pow_mod(a, static_cast<u64>((q + 1) / 2), p);
  i64 t = pow_mod(a, static_cast<u64>(q), p);
  int m = s;
  while (t != 1) {
    int i = 0;
    i64 tt = t;
    while (tt != 1) {
      tt = mul_mod(tt, tt, p);
      ++i;
    }
    i64 b = c;
    for (int j = 0; j < m - i - 1; ++j) b = mul_mod(b, b, p);
    x = mul_mod(x, b, p);
    c = mul_mod(b, b, p);
    t = mul_mod(t, c, p);
    m = i;
  }
  return x;
}

}  // namespace detail

/// Both square roots of beta mod p^gamma (smaller representative first), or
/// nullopt when beta is a non-residue mod p.
inline std::optional<std::pair<i64, i64>> sqrt_mod_pp(const Residue& beta, const PrimePower& pp) {
  if (pp.p == 2) throw EvenPrime("square roots modulo powers of 2 are not supported");
  if (beta.modulus != pp.q) throw InvalidArgument("residue modulus does not match p^gamma");
  if (beta.value % pp.p == 0) throw NonInvertible("beta must be a unit mod p");
  if (legendre(beta.value, pp.p) != 1) return std::nullopt;

  i64 x = detail::sqrt_mod_prime(beta.value % pp.p, pp.p);
  // Hensel lifting, one power of p at a time.
  i64 mod = pp.p;
  for (int k = 1; k < pp.gamma; ++k) {
    mod *= pp.p;
    const i64 f = reduce(mul_mod(x, x, mod) - beta.value, mod);
    const i64 step = mul_mod(f, inv_mod(mul_mod(2, x, mod), mod), mod);
    x = reduce(x - step, mod);
  }
  assert(mul_mod(x, x, pp.q) == beta.value);
  const i64 other = reduce(-x, pp.q);
  return std::pair{std::min(x, other), std::max(x, other)};
}

/// binom(-1/2, i) as an element of Z/p^gamma, via (-1/4)^i * C(2i, i).
inline i64 binom_neg_half(int i, i64 q) {
  // C(2i, i) built incrementally: C(2k, k) = C(2k-2, k-1) * (2k)(2k-1) / k^2.
  // Exact for i <= 30 in 64 bits.
  if (i < 0 || i > 30) throw InvalidArgument("binom(-1/2, i) supported for 0 <= i <= 30");
  u64 central = 1;
  for (int k = 1; k <= i; ++k) {
    central = static_cast<u64>(static_cast<unsigned __int128>(central) * (2 * k - 1) * 2 / k);
  }
  const i64 c = static_cast<i64>(central % static_cast<u64>(q));
  const i64 quarter = inv_mod(4 % q, q);
  const i64 sign = (i % 2 == 0) ? 1 : q - 1;
  return mul_mod(mul_mod(c, pow_mod(quarter, static_cast<u64>(i), q), q), sign, q);
}

/// Number of terms I + 1 needed so that (I + 1)(gamma - u) >= gamma.
inline int inv_sqrt_series_length(int gamma, int u) {
  const int step = gamma - u;
  return (gamma + step - 1) / step;
}

/// (s p^(gamma-u) a + t)^(-1/2) mod p^gamma by the truncated binomial series
/// around t. The branch of t^(-1/2) is the inverse of the smaller square root
/// of t.
inline Residue inv_sqrt_series(i64 s, i64 t, i64 a, const PrimePower& pp, int u) {
  if (pp.p == 2) throw EvenPrime("series requires an odd prime");
  if (u >= pp.gamma || u < 0) throw InvalidArgument("need 0 <= u < gamma");
  const i64 q = pp.q;
  if (t % pp.p == 0) throw NonInvertible("t must be a unit mod p");
  auto roots = sqrt_mod_pp(Residue{t, q}, pp);
  if (!roots) throw NonResidue(std::to_string(t) + " is not a square mod " + std::to_string(pp.p));

  const i64 t_inv = inv_mod(t, q);
  const i64 t_inv_sqrt = inv_mod(roots->first, q);
  const i64 shift = mul_mod(mul_mod(s, pow_mod(pp.p, static_cast<u64>(pp.gamma - u), q), q), a, q);

  const int terms = inv_sqrt_series_length(pp.gamma, u);
  i64 x = 0;
  i64 t_pow = t_inv_sqrt;  // t^(-i-1/2)
  i64 shift_pow = 1 % q;   // (s p^(gamma-u) a)^i
  for (int i = 0; i < terms; ++i) {
    const i64 term = mul_mod(mul_mod(binom_neg_half(i, q), t_pow, q), shift_pow, q);
    x = add_mod(x, term, q);
    t_pow = mul_mod(t_pow, t_inv, q);
    shift_pow = mul_mod(shift_pow, shift, q);
  }
  return {x, q};
}

/// Modular inverses of every residue mod q (0 where not invertible).
inline std::vector<i64> inverse_table(i64 q) {
  std::vector<i64> inv(static_cast<std::size_t>(q), 0);
  for (i64 x = 0; x < q; ++x) {
    if (auto v = try_inv(x, q); v && (q == 1 || x != 0)) inv[static_cast<std::size_t>(x)] = *v;
  }
  if (q == 1) inv[0] = 0;
  return inv;
}

/// Units of Z/q in increasing order. For q = 1 this is {0}.
inline std::vector<i64> units_mod(i64 q) {
  std::vector<i64> out;
  for (i64 x = 0; x < q; ++x) {
    if (std::gcd(x, q) == 1) out.push_back(x);
  }
  return out;
}

}  // namespace expsum
