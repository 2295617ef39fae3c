#pragma once

// d_3 in arithmetic progressions: exact progression sums, the coprime mean,
// the splitting into Ramanujan-sum pieces S(d) and discrepancy scans.

#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "errors.hpp"
#include "expsums.hpp"
#include "modarith.hpp"
#include "numeric.hpp"

namespace expsum {

/// num / den in lowest terms with den > 0.
struct Rational {
  i128 num = 0;
  i128 den = 1;

  Rational() = default;
  Rational(i128 n, i128 d) : num(n), den(d) {
    if (d == 0) throw InvalidArgument("zero denominator");
    normalize();
  }

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    i128 a = num < 0 ? -num : num, b = den;
    while (b != 0) {
      const i128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
  friend Rational operator-(const Rational& x, const Rational& y) { return {x.num * y.den - y.num * x.den, x.den * y.den}; }
  friend Rational operator+(const Rational& x, const Rational& y) { return {x.num * y.den + y.num * x.den, x.den * y.den}; }
};

inline std::string to_string(i128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  std::string s;
  while (v != 0) {
    const int digit = static_cast<int>(v % 10);
    s.push_back(static_cast<char>('0' + (digit < 0 ? -digit : digit)));
    v /= 10;
  }
  if (neg) s.push_back('-');
  return {s.rbegin(), s.rend()};
}

inline std::string to_string(const Rational& r) {
  return r.den == 1 ? to_string(r.num) : to_string(r.num) + "/" + to_string(r.den);
}

/// class_sums[r] = sum_{n <= X, n = r (q)} d_3(n), r in [0, q).
inline std::vector<i128> d3_class_sums(const DivisorTable& d3t, i64 X, i64 q) {
  if (q < 1) throw InvalidArgument("modulus must be >= 1");
  if (X > d3t.X) throw InvalidArgument("X exceeds the divisor table range");
  std::vector<i128> sums(static_cast<std::size_t>(q), 0);
  for (i64 n = 1; n <= X; ++n) sums[static_cast<std::size_t>(n % q)] += d3t(n);
  return sums;
}

inline i128 d3_ap_sum(const DivisorTable& d3t, i64 X, i64 q, i64 a) {
  if (q < 1) throw InvalidArgument("modulus must be >= 1");
  if (X <= 0) return 0;
  if (X > d3t.X) throw InvalidArgument("X exceeds the divisor table range");
  i128 total = 0;
  const i64 start = reduce(a, q) == 0 ? q : reduce(a, q);
  for (i64 n = start; n <= X; n += q) total += d3t(n);
  return total;
}

inline i128 d3_ap_sum(i64 X, i64 q, i64 a) {
  if (X <= 0) return 0;
  return d3_ap_sum(divisor_table(3, X), X, q, a);
}

/// (1/phi(q)) sum_{n <= X, (n, q) = 1} d_3(n).
inline Rational coprime_mean(const DivisorTable& d3t, i64 X, i64 q) {
  if (q < 1) throw InvalidArgument("modulus must be >= 1");
  if (X <= 0) return {0, 1};
  i128 total = 0;
  for (i64 n = 1; n <= X; ++n) {
    if (std::gcd(n, q) == 1) total += d3t(n);
  }
  return {total, euler_phi(q)};
}

inline Rational coprime_mean(i64 X, i64 q) {
  if (X <= 0) return {0, 1};
  return coprime_mean(divisor_table(3, X), X, q);
}

struct ApDiscrepancy {
  i64 X = 0, q = 1, a = 1;
  i128 ap_sum = 0;
  Rational coprime_mean;
  Rational delta_exact;
  double delta = 0.0;
};

/// One row per a coprime to q, in increasing a.
inline std::vector<ApDiscrepancy> ap_discrepancies(const DivisorTable& d3t, i64 X, i64 q) {
  const auto sums = d3_class_sums(d3t, X, q);
  i128 coprime_total = 0;
  for (i64 r = 0; r < q; ++r) {
    if (std::gcd(r, q) == 1) coprime_total += sums[static_cast<std::size_t>(r)];
  }
  const Rational mean(coprime_total, euler_phi(q));
  std::vector<ApDiscrepancy> rows;
  for (i64 a = 1; a <= q; ++a) {
    if (std::gcd(a, q) != 1) continue;
    ApDiscrepancy row{X, q, a, sums[static_cast<std::size_t>(a % q)], mean, {}, 0.0};
    row.delta_exact = Rational(row.ap_sum, 1) - mean;
    row.delta = row.delta_exact.to_double();
    rows.push_back(row);
  }
  return rows;
}

/// sum over the rows of delta, exactly. Zero by construction of the mean.
inline Rational delta_total(const std::vector<ApDiscrepancy>& rows) {
  Rational total(0, 1);
  for (const auto& r : rows) total = total + r.delta_exact;
  return total;
}

struct RamanujanDecomposition {
  i64 q = 1, a = 1, X = 0;
  std::vector<std::pair<i64, ComplexVal>> terms;  // (d, S(d)) for d | q, increasing d
  i128 ap_sum = 0;

  ComplexVal total() const {
    KahanSum<ComplexVal> s;
    for (const auto& [d, v] : terms) s += v;
    return s.value();
  }
  double residual() const { return std::abs(total() - ComplexVal(static_cast<double>(ap_sum), 0.0)); }
};

/// S(d) = (1/q) sum*_{alpha (d)} sum_{n <= X} d_3(n) e(alpha (n - a)/d), with n grouped
/// by its class mod d first. `sums` are the class sums mod q from d3_class_sums.
inline RamanujanDecomposition ramanujan_decomposition(const std::vector<i128>& sums, i64 X, i64 q, i64 a) {
  if (static_cast<i64>(sums.size()) != q) throw InvalidArgument("class sums must have q entries");
  if (std::gcd(reduce(a, q), q) != 1) throw NonCoprime("gcd(a, q) must be 1");
  RamanujanDecomposition out;
  out.q = q;
  out.a = a;
  out.X = X;
  out.ap_sum = sums[static_cast<std::size_t>(reduce(a, q))];
  for (i64 d : factorize(q).divisors()) {
    std::vector<double> by_class(static_cast<std::size_t>(d), 0.0);
    {
      std::vector<i128> exact(static_cast<std::size_t>(d), 0);
      for (i64 r = 0; r < q; ++r) exact[static_cast<std::size_t>(r % d)] += sums[static_cast<std::size_t>(r)];
      for (i64 r = 0; r < d; ++r) by_class[static_cast<std::size_t>(r)] = static_cast<double>(exact[static_cast<std::size_t>(r)]);
    }
    const RootTable roots(d);
    KahanSum<ComplexVal> s;
    for (i64 alpha : units_mod(d)) {
      for (i64 r = 0; r < d; ++r) s += by_class[static_cast<std::size_t>(r)] * roots[mul_mod(alpha, r - a, d)];
    }
    out.terms.emplace_back(d, s.value() / static_cast<double>(q));
  }
  return out;
}

inline RamanujanDecomposition ramanujan_decomposition(const DivisorTable& d3t, i64 X, i64 q, i64 a) {
  return ramanujan_decomposition(d3_class_sums(d3t, X, q), X, q, a);
}

inline RamanujanDecomposition ramanujan_decomposition(i64 X, i64 q, i64 a) {
  return ramanujan_decomposition(divisor_table(3, std::max<i64>(X, 0)), std::max<i64>(X, 0), q, a);
}

struct DiscrepancySummary {
  i64 q = 1;
  double max_abs_delta = 0.0;
  double normalized = 0.0;  // max_a |delta| * q / X
  bool zero_sum = false;
};

struct SlopeFit {
  double slope = 0.0, intercept = 0.0;
  std::vector<double> residuals;
};

/// Least squares for log y = intercept + slope log x. Points with y <= 0 are skipped.
inline SlopeFit fit_loglog(const std::vector<std::pair<double, double>>& points) {
  std::vector<std::pair<double, double>> lp;
  for (const auto& [x, y] : points) {
    if (x > 0.0 && y > 0.0) lp.emplace_back(std::log(x), std::log(y));
  }
  SlopeFit fit;
  if (lp.size() < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : lp) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(lp.size());
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return fit;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  for (const auto& [x, y] : lp) fit.residuals.push_back(y - fit.intercept - fit.slope * x);
  return fit;
}

struct DiscrepancyScan {
  std::vector<ApDiscrepancy> rows;
  std::vector<DiscrepancySummary> summaries;
  SlopeFit fit;
};

inline DiscrepancyScan discrepancy_scan(const DivisorTable& d3t, i64 X, const std::vector<i64>& moduli) {
  DiscrepancyScan scan;
  std::vector<std::pair<double, double>> points;
  for (i64 q : moduli) {
    if (q < 1 || q > X) throw InvalidArgument("moduli must satisfy 1 <= q <= X");
    auto rows = ap_discrepancies(d3t, X, q);
    DiscrepancySummary sum;
    sum.q = q;
    for (const auto& r : rows) sum.max_abs_delta = std::max(sum.max_abs_delta, std::fabs(r.delta));
    sum.normalized = sum.max_abs_delta * static_cast<double>(q) / static_cast<double>(X);
    sum.zero_sum = delta_total(rows).num == 0;
    points.emplace_back(static_cast<double>(q), sum.max_abs_delta);
    scan.summaries.push_back(sum);
    scan.rows.insert(scan.rows.end(), rows.begin(), rows.end());
  }
  scan.fit = fit_loglog(points);
  return scan;
}

/// sum_{Y < m <= 2Y} d_3(m) Kl3~(mb, qq) evaluated twice: directly, and after
/// writing d_3(m) = sum_{n1 m' = m} d(m') and summing over n1 outside.
inline std::pair<ComplexVal, ComplexVal> d3_to_bilinear(i64 Y, i64 qq, i64 b) {
  if (qq < 1) throw InvalidArgument("modulus must be >= 1");
  if (Y < 0 || Y > 1'000'000) throw InvalidArgument("Y must lie in [0, 10^6]");
  const HyperKl3Table table(qq);
  const DivisorTable d3t = divisor_table(3, 2 * Y);
  const DivisorTable d2t = divisor_table(2, 2 * Y);
  const i64 br = reduce(b, qq);
  KahanSum<ComplexVal> direct;
  for (i64 m = Y + 1; m <= 2 * Y; ++m) direct += static_cast<double>(d3t(m)) * table[mul_mod(m % qq, br, qq)];
  KahanSum<ComplexVal> glued;
  for (i64 n1 = 1; n1 <= 2 * Y; ++n1) {
    const i64 n1b = mul_mod(n1 % qq, br, qq);
    for (i64 mp = Y / n1 + 1; mp * n1 <= 2 * Y; ++mp) {
      glued += static_cast<double>(d2t(mp)) * table[mul_mod(mp % qq, n1b, qq)];
    }
  }
  return {direct.value(), glued.value()};
}

}  // namespace expsum
