#pragma once

// Multiplicative functions: factorization, divisor functions d_k, sigma_w,
// the sigma_{0,0} identity and Ramanujan sums.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "modarith.hpp"
#include "numeric.hpp"

namespace expsum {

class Factorization {
 public:
  Factorization() = default;
  Factorization(i64 n, std::vector<std::pair<i64, int>> factors) : n_(n), factors_(std::move(factors)) {}

  i64 n() const { return n_; }
  const std::vector<std::pair<i64, int>>& factors() const& { return factors_; }
  // Rvalue overload so that `for (auto f : factorize(n).factors())` owns its data.
  std::vector<std::pair<i64, int>> factors() && { return std::move(factors_); }

  int mobius() const {
    for (const auto& [p, e] : factors_) {
      if (e > 1) return 0;
    }
    return factors_.size() % 2 == 0 ? 1 : -1;
  }

  i64 phi() const {
    i64 result = 1;
    for (const auto& [p, e] : factors_) {
      result *= p - 1;
      for (int i = 1; i < e; ++i) result *= p;
    }
    return result;
  }

  int omega() const { return static_cast<int>(factors_.size()); }

  bool squarefree() const { return mobius() != 0; }

  // d = d0 * d1 with d0 the product of primes dividing d exactly once.
  i64 squarefree_part() const {
    i64 d0 = 1;
    for (const auto& [p, e] : factors_) {
      if (e == 1) d0 *= p;
    }
    return d0;
  }

  i64 squarefull_part() const { return n_ / squarefree_part(); }

  /// The prime-power components p_i^{e_i}.
  std::vector<PrimePower> prime_powers() const {
    std::vector<PrimePower> out;
    for (const auto& [p, e] : factors_) {
      i64 q = 1;
      for (int i = 0; i < e; ++i) q *= p;
      out.push_back({p, e, q});
    }
    return out;
  }

  /// All positive divisors in increasing order.
  std::vector<i64> divisors() const {
    std::vector<i64> divs{1};
    for (const auto& [p, e] : factors_) {
      const std::size_t base = divs.size();
      i64 pk = 1;
      for (int k = 1; k <= e; ++k) {
        pk *= p;
        for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
      }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
  }

 private:
  i64 n_ = 1;
  std::vector<std::pair<i64, int>> factors_;
};

/// Trial division up to sqrt(n); n <= 10^12.
inline Factorization factorize(i64 n) {
  if (n < 1) throw InvalidArgument("factorize expects n >= 1, got " + std::to_string(n));
  if (n > 1'000'000'000'000) throw InvalidArgument("factorize is limited to n <= 10^12");
  std::vector<std::pair<i64, int>> factors;
  i64 m = n;
  for (i64 d = 2; d * d <= m; d += (d == 2 ? 1 : 2)) {
    if (m % d == 0) {
      int e = 0;
      while (m % d == 0) {
        m /= d;
        ++e;
      }
      factors.emplace_back(d, e);
    }
  }
  if (m > 1) factors.emplace_back(m, 1);
  return {n, std::move(factors)};
}

inline i64 euler_phi(i64 n) { return factorize(n).phi(); }
inline int mobius(i64 n) { return factorize(n).mobius(); }

/// d_k(n) for 1 <= n <= X, stored as 32-bit counts.
struct DivisorTable {
  int k = 3;
  i64 X = 0;
  std::vector<std::uint32_t> values;  // values[0] unused

  std::uint32_t operator()(i64 n) const { return values[static_cast<std::size_t>(n)]; }
};

/// Sieve d_k by k-fold Dirichlet convolution of the constant function 1.
inline DivisorTable divisor_table(int k, i64 X) {
  if (k < 1 || k > 3) throw InvalidArgument("divisor_table supports k in {1, 2, 3}");
  if (X < 0 || X > 100'000'000) throw InvalidArgument("divisor_table range must be 0 <= X <= 10^8");
  const auto size = static_cast<std::size_t>(X + 1);
  std::vector<std::uint32_t> current(size, 1);
  current[0] = 0;
  for (int level = 2; level <= k; ++level) {
    std::vector<std::uint32_t> next(size, 0);
    for (i64 i = 1; i <= X; ++i) {
      const std::uint32_t c = current[static_cast<std::size_t>(i)];
      for (i64 j = i; j <= X; j += i) next[static_cast<std::size_t>(j)] += c;
    }
    current = std::move(next);
  }
  return {k, X, std::move(current)};
}

/// d_3(n) from the factorization: prod C(e + 2, 2).
inline i64 d3(i64 n) {
  i64 r = 1;
  for (const auto& [p, e] : factorize(n).factors()) r *= static_cast<i64>(e + 2) * (e + 1) / 2;
  return r;
}

inline i64 divisor_count(i64 n) {
  i64 r = 1;
  for (const auto& [p, e] : factorize(n).factors()) r *= e + 1;
  return r;
}

/// sum_{d | n} d^k exactly.
inline i128 sigma_k(i64 n, unsigned k) {
  i128 total = 0;
  for (i64 d : factorize(n).divisors()) {
    i128 term = 1;
    for (unsigned i = 0; i < k; ++i) term *= d;
    total += term;
  }
  return total;
}

/// sum_{d | n} d^w. Exact when w is a nonnegative integer.
inline ComplexVal sigma_w(i64 n, ComplexVal w) {
  if (n < 1) throw InvalidArgument("sigma_w expects n >= 1");
  if (w.imag() == 0.0 && w.real() >= 0.0 && w.real() <= 8.0 && w.real() == std::floor(w.real())) {
    return {static_cast<double>(sigma_k(n, static_cast<unsigned>(w.real()))), 0.0};
  }
  KahanSum<ComplexVal> total;
  for (i64 d : factorize(n).divisors()) total += std::exp(w * std::log(static_cast<double>(d)));
  return total.value();
}

enum class IdentityCheck { kConvolutionOnly, kBoth };

#ifdef NDEBUG
inline constexpr IdentityCheck kDefaultIdentityCheck = IdentityCheck::kConvolutionOnly;
#else
inline constexpr IdentityCheck kDefaultIdentityCheck = IdentityCheck::kBoth;
#endif

/// sum_{d1 | l} sum_{d2 | l/d1, (d2, k) = 1} 1, by direct enumeration.
inline i64 sigma00_enumerated(i64 k, i64 l) {
  i64 count = 0;
  for (i64 d1 : factorize(l).divisors()) {
    for (i64 d2 : factorize(l / d1).divisors()) {
      if (std::gcd(d2, k) == 1) ++count;
    }
  }
  return count;
}

/// sum_{a | (k, l)} mu(a) d_3(l / a).
inline i64 sigma00_convolution(i64 k, i64 l) {
  i64 total = 0;
  const i64 g = std::gcd(k, l);
  for (i64 a : factorize(g).divisors()) {
    const int mu = mobius(a);
    if (mu != 0) total += mu * d3(l / a);
  }
  return total;
}

inline i64 sigma00(i64 k, i64 l, IdentityCheck check = kDefaultIdentityCheck) {
  if (k < 1 || l < 1) throw InvalidArgument("sigma00 expects k, l >= 1");
  const i64 value = sigma00_convolution(k, l);
  if (check == IdentityCheck::kBoth) {
    const i64 other = sigma00_enumerated(k, l);
    if (other != value) {
      throw IdentityViolation("sigma00(" + std::to_string(k) + ", " + std::to_string(l) + "): " +
                              std::to_string(other) + " != " + std::to_string(value));
    }
  }
  return value;
}

/// c_q(n) = mu(q/g) phi(q) / phi(q/g), g = gcd(n, q).
inline i64 ramanujan_sum(i64 q, i64 n) {
  if (q < 1) throw InvalidArgument("ramanujan_sum expects q >= 1");
  const i64 g = std::gcd(reduce(n, q), q);
  const i64 r = q / g;
  return mobius(r) * (euler_phi(q) / euler_phi(r));
}

/// c_q(n) by summing e(alpha n / q) over units alpha.
inline ComplexVal ramanujan_sum_direct(i64 q, i64 n) {
  KahanSum<ComplexVal> total;
  for (i64 alpha = 0; alpha < q; ++alpha) {
    if (std::gcd(alpha, q) == 1) total += unit_root(mul_mod(alpha, reduce(n, q), q), q);
  }
  return total.value();
}

}  // namespace expsum
