#pragma once

// Bilinear sums S = sum_{n in window} sum_m alpha_n lambda(m) Kl3~(mnb, q) V(m/M)
// with lambda(m) = sigma_{s1 - 2w}(m) m^{s2}, together with the reference bounds
// they are compared against.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "arith.hpp"
#include "errors.hpp"
#include "expsums.hpp"
#include "modarith.hpp"
#include "numeric.hpp"
#include "voronoi.hpp"

namespace expsum {

struct BilinearConfig {
  i64 q = 1;
  i64 b = 1;
  i64 M = 1;
  i64 N = 1;
  i64 n0 = 1;  // the window is n0, n0 + 1, ..., n0 + N - 1
  ComplexVal w{0.0, 0.0};
  ComplexVal s1{0.0, 0.0};
  ComplexVal s2{0.0, 0.0};
  std::vector<ComplexVal> alpha;  // size N, |alpha_n| <= 1; empty means all ones

  void validate() const {
    if (q < 1) throw InvalidArgument("modulus must be >= 1");
    if (std::gcd(reduce(b, q), q) != 1) throw NonCoprime("gcd(b, q) must be 1");
    if (M < 0 || N < 0) throw InvalidArgument("M and N must be nonnegative");
    if (!alpha.empty() && static_cast<i64>(alpha.size()) != N) throw InvalidArgument("alpha must have N entries");
    for (const auto& a : alpha) {
      if (std::abs(a) > 1.0 + 1e-12) throw InvalidArgument("coefficients must satisfy |alpha_n| <= 1");
    }
  }

  ComplexVal alpha_at(i64 k) const { return alpha.empty() ? ComplexVal{1.0, 0.0} : alpha[static_cast<std::size_t>(k)]; }
};

/// The weight V(x): the standard bump on [1, 2].
inline const SmoothWeight& bilinear_weight() {
  static const SmoothWeight V(1.0);
  return V;
}

/// lambda(m) V(m/M) for the integers m with V(m/M) != 0, i.e. M < m < 2M.
struct MWeights {
  i64 first = 1;
  std::vector<ComplexVal> values;
};

inline MWeights m_weights(const BilinearConfig& cfg) {
  MWeights out;
  out.first = cfg.M + 1;
  const double Md = static_cast<double>(cfg.M);
  const ComplexVal order = cfg.s1 - 2.0 * cfg.w;
  for (i64 m = cfg.M + 1; m < 2 * cfg.M; ++m) {
    const double v = bilinear_weight()(static_cast<double>(m) / Md);
    ComplexVal lam = sigma_w(m, order);
    if (cfg.s2 != ComplexVal{0.0, 0.0}) lam *= std::exp(cfg.s2 * std::log(static_cast<double>(m)));
    out.values.push_back(lam * v);
  }
  return out;
}

/// Direct double sum.
inline ComplexVal bilinear_sum(const BilinearConfig& cfg, const HyperKl3Table& table) {
  cfg.validate();
  if (table.modulus() != cfg.q) throw InvalidArgument("table modulus must equal q");
  const MWeights mw = m_weights(cfg);
  const i64 q = cfg.q;
  const i64 b = reduce(cfg.b, q);
  KahanSum<ComplexVal> total;
  for (i64 k = 0; k < cfg.N; ++k) {
    const i64 nb = mul_mod(reduce(cfg.n0 + k, q), b, q);
    KahanSum<ComplexVal> inner;
    for (std::size_t j = 0; j < mw.values.size(); ++j) {
      const i64 m = mw.first + static_cast<i64>(j);
      inner += mw.values[j] * table[mul_mod(m % q, nb, q)];
    }
    total += cfg.alpha_at(k) * inner.value();
  }
  return total.value();
}

inline ComplexVal bilinear_sum(const BilinearConfig& cfg) { return bilinear_sum(cfg, HyperKl3Table(cfg.q)); }

/// Same sum with m and n first collected into residue classes mod q.
inline ComplexVal bilinear_grouped(const BilinearConfig& cfg, const HyperKl3Table& table) {
  cfg.validate();
  if (table.modulus() != cfg.q) throw InvalidArgument("table modulus must equal q");
  const i64 q = cfg.q;
  const MWeights mw = m_weights(cfg);
  std::vector<KahanSum<ComplexVal>> A(static_cast<std::size_t>(q)), B(static_cast<std::size_t>(q));
  for (std::size_t j = 0; j < mw.values.size(); ++j) A[static_cast<std::size_t>((mw.first + static_cast<i64>(j)) % q)] += mw.values[j];
  for (i64 k = 0; k < cfg.N; ++k) B[static_cast<std::size_t>(reduce(cfg.n0 + k, q))] += cfg.alpha_at(k);

  std::vector<std::pair<i64, ComplexVal>> rows, cols;
  for (i64 r = 0; r < q; ++r) {
    const ComplexVal a = A[static_cast<std::size_t>(r)].value();
    const ComplexVal c = B[static_cast<std::size_t>(r)].value();
    if (a != ComplexVal{}) rows.emplace_back(r, a);
    if (c != ComplexVal{}) cols.emplace_back(mul_mod(r, reduce(cfg.b, q), q), c);
  }
  KahanSum<ComplexVal> total;
  for (const auto& [r2b, c] : cols) {
    KahanSum<ComplexVal> inner;
    for (const auto& [r1, a] : rows) inner += a * table[mul_mod(r1, r2b, q)];
    total += c * inner.value();
  }
  return total.value();
}

inline ComplexVal bilinear_grouped(const BilinearConfig& cfg) { return bilinear_grouped(cfg, HyperKl3Table(cfg.q)); }

enum class BoundKind { kSquarefree, kPrimePower, kAlt };

/// Right-hand sides of the bilinear estimates with the q^eps factor dropped:
///   squarefree: q^{3/8} M^{1/2} N^{3/4} (1+M/q)^{1/2} + q^{-1/4} M N^{3/2} (1+M/q) + N q^{3/4} (1+M/q)^{1/2}
///   primepower: p^{7/12} q^{1/3} M^{1/2} N^{5/6} (1+M/q)^{2/3} + q^{13/20} N
///   alt:        M N^{1/2} + M^{1/2} N q^{1/4} (1+M/q)^{1/2}
inline double thm_bound(BoundKind kind, double q, double M, double N, double p = 0.0) {
  if (!(q > 0.0 && M > 0.0 && N > 0.0)) throw InvalidArgument("thm_bound needs positive q, M, N");
  const double g = 1.0 + M / q;
  switch (kind) {
    case BoundKind::kSquarefree:
      return std::pow(q, 0.375) * std::sqrt(M) * std::pow(N, 0.75) * std::sqrt(g) +
             std::pow(q, -0.25) * M * std::pow(N, 1.5) * g + N * std::pow(q, 0.75) * std::sqrt(g);
    case BoundKind::kPrimePower:
      if (!(p > 0.0)) throw InvalidArgument("prime-power bound needs p > 0");
      return std::pow(p, 7.0 / 12.0) * std::cbrt(q) * std::sqrt(M) * std::pow(N, 5.0 / 6.0) * std::pow(g, 2.0 / 3.0) +
             std::pow(q, 0.65) * N;
    case BoundKind::kAlt:
      return M * std::sqrt(N) + std::sqrt(M) * N * std::pow(q, 0.25) * std::sqrt(g);
  }
  return 0.0;
}

struct CancellationReport {
  i64 q = 1, p = 0, M = 0, N = 0;
  ComplexVal sum_value;
  ComplexVal grouped_value;
  double trivial_bound = 0.0;
  double thm_squarefree = 0.0;
  double thm_primepower = std::numeric_limits<double>::quiet_NaN();
  double thm_alt = 0.0;
  double exponent = 0.0;
  bool hyp_squarefree = false;  // q square-free and N <= q^{1/2} (1+M/q)^{-2}
  bool hyp_primepower = false;  // q = p^gamma, gamma >= 2, p > 2, N <= q^{1/5} (1+M/q)^{-2}

  bool hypothesis_ok() const { return hyp_squarefree || hyp_primepower; }
  bool within_trivial() const { return std::abs(sum_value) <= trivial_bound * (1.0 + 1e-9); }
  double path_residual() const { return std::abs(sum_value - grouped_value); }
};

/// Both evaluation paths, the trivial bound sum|alpha_n| * sum|lambda(m) V(m/M)| * max_r |Kl3~(r, q)|,
/// the reference curves and the hypothesis flags.
inline CancellationReport cancellation_report(const BilinearConfig& cfg) {
  const HyperKl3Table table(cfg.q);
  CancellationReport rep;
  rep.q = cfg.q;
  rep.M = cfg.M;
  rep.N = cfg.N;
  rep.sum_value = bilinear_sum(cfg, table);
  rep.grouped_value = bilinear_grouped(cfg, table);

  double alpha_mass = 0.0, m_mass = 0.0;
  for (i64 k = 0; k < cfg.N; ++k) alpha_mass += std::abs(cfg.alpha_at(k));
  for (const auto& v : m_weights(cfg).values) m_mass += std::abs(v);
  rep.trivial_bound = alpha_mass * m_mass * table.max_abs();

  const double qd = static_cast<double>(cfg.q), Md = static_cast<double>(std::max<i64>(cfg.M, 1)),
               Nd = static_cast<double>(std::max<i64>(cfg.N, 1));
  const double g = 1.0 + Md / qd;
  rep.thm_squarefree = thm_bound(BoundKind::kSquarefree, qd, Md, Nd);
  rep.thm_alt = thm_bound(BoundKind::kAlt, qd, Md, Nd);
  const auto pp = as_prime_power(cfg.q);
  if (pp) {
    rep.p = pp->p;
    rep.thm_primepower = thm_bound(BoundKind::kPrimePower, qd, Md, Nd, static_cast<double>(pp->p));
  }
  rep.hyp_squarefree = factorize(cfg.q).squarefree() && Nd <= std::sqrt(qd) / (g * g);
  rep.hyp_primepower = pp && pp->gamma >= 2 && pp->p > 2 && Nd <= std::pow(qd, 0.2) / (g * g);

  const double s = std::abs(rep.sum_value);
  if (rep.trivial_bound > 1.0 && s > 0.0) {
    rep.exponent = std::log(s) / std::log(rep.trivial_bound);
  } else {
    rep.exponent = (rep.trivial_bound > 0.0 && std::fabs(s - rep.trivial_bound) <= 1e-12 * rep.trivial_bound)
                       ? 1.0
                       : std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

}  // namespace expsum
