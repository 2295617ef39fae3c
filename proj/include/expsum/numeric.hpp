#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace expsum {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;

using ComplexVal = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Least nonnegative residue of n modulo q (q >= 1).
constexpr i64 reduce(i64 n, i64 q) {
  i64 r = n % q;
  return r < 0 ? r + q : r;
}

/// e(num/den) = exp(2 pi i num/den), with the numerator reduced first so
/// that the angle stays in [0, 2 pi).
inline ComplexVal unit_root(i64 num, i64 den) {
  const i64 r = reduce(num, den);
  const double angle = kTwoPi * (static_cast<double>(r) / static_cast<double>(den));
  return {std::cos(angle), std::sin(angle)};
}

/// Table of e(r/q), r in [0, q).
class RootTable {
 public:
  explicit RootTable(i64 q) : q_(q), roots_(static_cast<std::size_t>(q)) {
    for (i64 r = 0; r < q; ++r) roots_[static_cast<std::size_t>(r)] = unit_root(r, q);
  }

  i64 modulus() const { return q_; }
  const ComplexVal& operator[](i64 r) const { return roots_[static_cast<std::size_t>(r)]; }
  ComplexVal at(i64 n) const { return roots_[static_cast<std::size_t>(reduce(n, q_))]; }

 private:
  i64 q_;
  std::vector<ComplexVal> roots_;
};

/// Neumaier-compensated accumulator.
template <typename T>
class KahanSum {
 public:
  void add(T x) {
    if constexpr (std::is_same_v<T, ComplexVal>) {
      re_.add(x.real());
      im_.add(x.imag());
    } else {
      const T t = sum_ + x;
      if (std::abs(sum_) >= std::abs(x)) {
        comp_ += (sum_ - t) + x;
      } else {
        comp_ += (x - t) + sum_;
      }
      sum_ = t;
    }
  }

  KahanSum& operator+=(T x) {
    add(x);
    return *this;
  }

  T value() const {
    if constexpr (std::is_same_v<T, ComplexVal>) {
      return {re_.value(), im_.value()};
    } else {
      return sum_ + comp_;
    }
  }

 private:
  struct Empty {};
  using Part = std::conditional_t<std::is_same_v<T, ComplexVal>, KahanSum<double>, Empty>;
  T sum_{};
  T comp_{};
  [[no_unique_address]] Part re_{};
  [[no_unique_address]] Part im_{};
};

inline bool is_finite(const ComplexVal& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace expsum
