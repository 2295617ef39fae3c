#pragma once

// Voronoi summation for the divisor function with a smooth weight h on [X, 2X]:
//
//   sum_n d(n) e(an/q) h(n) = (1/q) int (log x + 2 gamma - 2 log q) h(x) dx
//       + (1/q) sum_n d(n) [ e(-a'n/q) H-(n/q^2) + e(a'n/q) H+(n/q^2) ],
//
// a' = inv(a) mod q, H-(y) = -2 pi int h(x) Y0(4 pi sqrt(xy)) dx and
// H+(y) = 4 int h(x) K0(4 pi sqrt(xy)) dx.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <vector>

#include "arith.hpp"
#include "bessel.hpp"
#include "errors.hpp"
#include "modarith.hpp"
#include "numeric.hpp"
#include "quadrature.hpp"

namespace expsum {

/// h(x) = e * exp(-1/(1 - s^2)), s = (2x - 3X)/X, on (X, 2X); zero elsewhere. h(3X/2) = 1.
class SmoothWeight {
 public:
  explicit SmoothWeight(double X) : X_(X) {
    if (!(X > 0.0)) throw InvalidArgument("weight scale X must be positive");
  }

  double X() const { return X_; }
  double lower() const { return X_; }
  double upper() const { return 2.0 * X_; }

  double operator()(double x) const {
    const double s = (2.0 * x - 3.0 * X_) / X_;
    const double gap = 1.0 - s * s;
    if (gap <= 0.0) return 0.0;
    return std::exp(1.0 - 1.0 / gap);
  }

 private:
  double X_;
};

struct VoronoiReport {
  i64 a = 1, q = 1;
  double X = 0.0;
  ComplexVal lhs;
  ComplexVal rhs_main;
  ComplexVal rhs_dual;
  i64 N_max = 0;
  double residual = 0.0;
  // Main term with the logarithmic factor log(sqrt(x)/q) + gamma, which is half
  // of the factor above; kept so a report shows the size of that difference.
  ComplexVal half_log_main;
  double half_log_residual = 0.0;

  double relative_residual() const { return residual / std::max(std::abs(lhs), 1e-300); }
  bool passes(double rel_tol = 1e-6) const { return residual <= rel_tol * std::abs(lhs); }
  bool half_log_main_consistent(double rel_tol = 1e-6) const { return half_log_residual <= rel_tol * std::abs(lhs); }
};

inline ComplexVal voronoi_lhs(i64 a, i64 q, const SmoothWeight& h) {
  if (q < 1) throw InvalidArgument("modulus must be >= 1");
  if (std::gcd(reduce(a, q), q) != 1) throw NonCoprime("gcd(a, q) must be 1");
  const i64 lo = static_cast<i64>(std::ceil(h.lower()));
  const i64 hi = static_cast<i64>(std::floor(h.upper()));
  KahanSum<ComplexVal> sum;
  for (i64 n = std::max<i64>(lo, 1); n <= hi; ++n) {
    const double w = h(static_cast<double>(n));
    if (w == 0.0) continue;
    sum += static_cast<double>(divisor_count(n)) * w * unit_root(mul_mod(a, n, q), q);
  }
  return sum.value();
}

/// (1/q) int (log x + 2 gamma - 2 log q) h(x) dx.
inline double voronoi_main(i64 q, const SmoothWeight& h) {
  const double shift = 2.0 * static_cast<double>(kEulerGamma) - 2.0 * std::log(static_cast<double>(q));
  const double val = integrate_adaptive([&](double x) { return (std::log(x) + shift) * h(x); }, h.lower(), h.upper(), 1e-13);
  return val / static_cast<double>(q);
}

/// (1/q) int (log(sqrt(x)/q) + gamma) h(x) dx.
inline double voronoi_main_half_log(i64 q, const SmoothWeight& h) {
  const double qd = static_cast<double>(q);
  const double val = integrate_adaptive(
      [&](double x) { return (std::log(std::sqrt(x) / qd) + static_cast<double>(kEulerGamma)) * h(x); }, h.lower(),
      h.upper(), 1e-13);
  return val / qd;
}

/// H-(n/q^2) and H+(n/q^2) for n = 1, 2, ... These do not depend on a, so one
/// kernel table serves every residue class mod q.
class VoronoiKernels {
 public:
  VoronoiKernels(i64 q, double X) : q_(q), h_(X), t0_(std::sqrt(X)), t1_(std::sqrt(2.0 * X)) {
    if (q < 1) throw InvalidArgument("modulus must be >= 1");
    minus_.push_back(0.0);
    plus_.push_back(0.0);
    divisors_.push_back(0);
  }

  i64 q() const { return q_; }
  const SmoothWeight& weight() const { return h_; }
  i64 size() const { return static_cast<i64>(minus_.size()) - 1; }
  double minus(i64 n) const { return minus_[static_cast<std::size_t>(n)]; }
  double plus(i64 n) const { return plus_[static_cast<std::size_t>(n)]; }
  i64 divisors(i64 n) const { return divisors_[static_cast<std::size_t>(n)]; }

  /// |d(n)| (|H-| + |H+|) / q, the size of the n-th dual term.
  double term_size(i64 n) const {
    return static_cast<double>(divisors(n)) * (std::fabs(minus(n)) + std::fabs(plus(n))) / static_cast<double>(q_);
  }

  void extend_to(i64 N) {
    for (i64 n = size() + 1; n <= N; ++n) {
      const auto [hm, hp] = evaluate(n);
      minus_.push_back(hm);
      plus_.push_back(hp);
      divisors_.push_back(divisor_count(n));
    }
  }

  /// Largest term size over the window (from, to].
  double window_max(i64 from, i64 to) const {
    double m = 0.0;
    for (i64 n = std::max<i64>(from + 1, 1); n <= to; ++n) m = std::max(m, term_size(n));
    return m;
  }

  /// Extends until the estimated tail beyond n is below abs_tol. The term envelope
  /// is modelled as C exp(-c sqrt(n)), with c fitted from the window maxima near
  /// n/4 and near n; the tail is then at most about T(n) (1 + 2 sqrt(n)/c).
  /// Returns the cutoff n.
  i64 extend_until(double abs_tol, i64 cap) {
    i64 next_check = 256;
    for (i64 n = 1; n <= cap; ++n) {
      if (n > size()) extend_to(n);
      if (n < next_check) continue;
      next_check = n + std::max<i64>(64, n / 64);
      const i64 w = std::max<i64>(64, n / 16);
      const double late = window_max(n - w, n);
      const double early = window_max(n / 4 - w, n / 4);
      if (late < 1e-3 * abs_tol) return n;
      if (!(early > late)) continue;
      const double c = std::log(early / late) / (std::sqrt(static_cast<double>(n)) - std::sqrt(n / 4.0));
      const double tail = late * (1.0 + 2.0 * std::sqrt(static_cast<double>(n)) / c);
      if (tail < abs_tol) return n;
    }
    throw CutoffTooSmall("dual sum did not converge below cap " + std::to_string(cap));
  }

  /// Grid scale used by the trapezoid branch: the weight's Fourier transform in t is
  /// taken as negligible beyond kSpectralCut / sqrt(X).
  static constexpr double kSpectralCut = 6000.0;
  /// Arguments omega * sqrt(X) at or above this use the Hankel-expanded kernel.
  static constexpr double kHankelStart = 150.0;
  static constexpr int kHankelTerms = 6;

 private:
  // With x = t^2 the kernels become functions of omega * t, omega = 4 pi sqrt(n)/q,
  // integrated against g(t) = 2 t h(t^2) over [sqrt X, sqrt 2X].
  std::pair<double, double> evaluate(i64 n) const {
    const double omega = 4.0 * std::numbers::pi * std::sqrt(static_cast<double>(n)) / static_cast<double>(q_);
    if (omega * t0_ >= kHankelStart) return {evaluate_hankel(omega), 0.0};
    return evaluate_panels(omega);
  }

  // Gauss-Legendre panels at most one kernel period wide and at most 1/32 of the range.
  std::pair<double, double> evaluate_panels(double omega) const {
    const double length = t1_ - t0_;
    const double period = 2.0 * std::numbers::pi / omega;
    const int panels = std::max(32, static_cast<int>(std::ceil(length / period)));
    const double width = length / panels;
    const GaussRule& rule = gauss_rule(20);
    KahanSum<double> ym, kp;
    for (int k = 0; k < panels; ++k) {
      const double a = t0_ + k * width;
      const double half = 0.5 * width, mid = a + half;
      double ys = 0.0, ks = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = mid + half * rule.nodes[i];
        const double g = 2.0 * t * h_(t * t) * rule.weights[i];
        if (g == 0.0) continue;
        ys += g * bessel_y0(omega * t);
        ks += g * bessel_k0(omega * t);
      }
      ym += ys * half;
      kp += ks * half;
    }
    return {-2.0 * std::numbers::pi * ym.value(), 4.0 * kp.value()};
  }

  // g(t_j) t_j^(-1/2-k) on a uniform grid of M intervals, k < kHankelTerms.
  struct Grid {
    int M = 0;
    double step = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;  // row-major [j][k]
  };

  const Grid& grid_for(double omega) const {
    const double length = t1_ - t0_;
    const double need = length * (omega + kSpectralCut / t0_) / (2.0 * std::numbers::pi);
    int M = 64;
    while (M < need) M = static_cast<int>(std::ceil(M * 1.25));
    std::lock_guard lock(grid_mutex_);
    auto& slot = grids_[M];
    if (!slot) {
      slot = std::make_unique<Grid>();
      slot->M = M;
      slot->step = length / M;
      for (int j = 1; j < M; ++j) {
        const double t = t0_ + j * slot->step;
        const double g = 2.0 * t * h_(t * t);
        slot->nodes.push_back(t);
        double pw = g / std::sqrt(t);
        for (int k = 0; k < kHankelTerms; ++k) {
          slot->weights.push_back(pw);
          pw /= t;
        }
      }
    }
    return *slot;
  }

  // Y0(z) = Im[ sqrt(2/(pi z)) e^{i(z - pi/4)} sum_k i^k a_k z^{-k} ], a_k = prod_{j<=k} (-(2j-1)^2) / (k! 8^k).
  // The integrand vanishes to all orders at both ends, so the trapezoid rule is
  // accurate up to the aliased spectrum beyond the grid frequency.
  double evaluate_hankel(double omega) const {
    const Grid& grid = grid_for(omega);
    std::array<ComplexVal, kHankelTerms> coef;
    ComplexVal ik{1.0, 0.0};
    double a = 1.0, wk = 1.0;
    for (int k = 0; k < kHankelTerms; ++k) {
      if (k > 0) {
        a *= -static_cast<double>((2 * k - 1) * (2 * k - 1)) / (8.0 * k);
        ik *= ComplexVal{0.0, 1.0};
        wk /= omega;
      }
      coef[static_cast<std::size_t>(k)] = ik * a * wk;
    }
    const ComplexVal rot = std::polar(1.0, omega * grid.step);
    ComplexVal phase = std::polar(1.0, omega * grid.nodes.front());
    ComplexVal total{0.0, 0.0};
    const double* w = grid.weights.data();
    for (std::size_t j = 0; j < grid.nodes.size(); ++j, w += kHankelTerms) {
      ComplexVal amp{0.0, 0.0};
      for (int k = 0; k < kHankelTerms; ++k) amp += coef[static_cast<std::size_t>(k)] * w[k];
      total += phase * amp;
      // Recompute the phase now and then so the rotation error does not build up.
      phase = ((j & 63U) == 63U && j + 1 < grid.nodes.size()) ? std::polar(1.0, omega * grid.nodes[j + 1]) : phase * rot;
    }
    const ComplexVal value = std::sqrt(2.0 / (std::numbers::pi * omega)) * std::polar(1.0, -std::numbers::pi / 4.0) * total * grid.step;
    return -2.0 * std::numbers::pi * value.imag();
  }

  i64 q_;
  SmoothWeight h_;
  double t0_, t1_;
  std::vector<double> minus_, plus_;
  std::vector<i64> divisors_;
  mutable std::mutex grid_mutex_;
  mutable std::map<int, std::unique_ptr<Grid>> grids_;
};

/// Shared kernel tables keyed by (q, X).
class VoronoiKernelCache {
 public:
  std::shared_ptr<VoronoiKernels> get(i64 q, double X) {
    std::lock_guard lock(mutex_);
    auto& slot = cache_[{q, X}];
    if (!slot) slot = std::make_shared<VoronoiKernels>(q, X);
    return slot;
  }

  static VoronoiKernelCache& global() {
    static VoronoiKernelCache cache;
    return cache;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<i64, double>, std::shared_ptr<VoronoiKernels>> cache_;
};

struct VoronoiRhs {
  double main = 0.0;
  ComplexVal dual;
  i64 N_max = 0;
};

inline ComplexVal voronoi_dual_sum(i64 a, const VoronoiKernels& kernels, i64 N) {
  const i64 q = kernels.q();
  const i64 a_inv = inv_mod(a, q);
  KahanSum<ComplexVal> sum;
  for (i64 n = 1; n <= N; ++n) {
    const i64 r = mul_mod(a_inv, n, q);
    const ComplexVal plus = unit_root(r, q);
    sum += static_cast<double>(kernels.divisors(n)) * (std::conj(plus) * kernels.minus(n) + plus * kernels.plus(n));
  }
  return sum.value() / static_cast<double>(q);
}

/// Right-hand side. With N_max unset the dual sum runs until the estimated tail is
/// below 1e-9 max(1, |main|). With N_max given, the last
/// K-term must be below 1e-8 |dual| and the last Y-term below 1e-8 max(|dual|, |main|).
inline VoronoiRhs voronoi_rhs(i64 a, i64 q, const SmoothWeight& h, std::optional<i64> N_max = std::nullopt,
                              VoronoiKernelCache& cache = VoronoiKernelCache::global()) {
  if (q < 1) throw InvalidArgument("modulus must be >= 1");
  if (std::gcd(reduce(a, q), q) != 1) throw NonCoprime("gcd(a, q) must be 1");
  VoronoiRhs out;
  out.main = voronoi_main(q, h);
  auto kernels = cache.get(q, h.X());
  const double scale = std::max(std::fabs(out.main), 1.0);
  if (N_max) {
    if (*N_max < 1) throw CutoffTooSmall("N_max must be >= 1");
    kernels->extend_to(*N_max);
    out.N_max = *N_max;
  } else {
    out.N_max = kernels->extend_until(1e-9 * scale, 5'000'000);
  }
  out.dual = voronoi_dual_sum(a, *kernels, out.N_max);
  if (N_max) {
    const i64 n = *N_max;
    const double d = static_cast<double>(kernels->divisors(n)) / static_cast<double>(q);
    const double k_term = d * std::fabs(kernels->plus(n));
    const double y_term = d * std::fabs(kernels->minus(n));
    if (k_term > 1e-8 * std::abs(out.dual) || y_term > 1e-8 * std::max(std::abs(out.dual), std::fabs(out.main))) {
      throw CutoffTooSmall("N_max = " + std::to_string(n) + " leaves a dual term of size " +
                           std::to_string(std::max(k_term, y_term)));
    }
  }
  return out;
}

inline VoronoiReport voronoi_residual(i64 a, i64 q, const SmoothWeight& h, std::optional<i64> N_max = std::nullopt,
                                      VoronoiKernelCache& cache = VoronoiKernelCache::global()) {
  VoronoiReport rep;
  rep.a = a;
  rep.q = q;
  rep.X = h.X();
  rep.lhs = voronoi_lhs(a, q, h);
  const VoronoiRhs rhs = voronoi_rhs(a, q, h, N_max, cache);
  rep.rhs_main = rhs.main;
  rep.rhs_dual = rhs.dual;
  rep.N_max = rhs.N_max;
  rep.residual = std::abs(rep.lhs - rep.rhs_main - rep.rhs_dual);
  rep.half_log_main = voronoi_main_half_log(q, h);
  rep.half_log_residual = std::abs(rep.lhs - rep.half_log_main - rep.rhs_dual);
  return rep;
}

}  // namespace expsum
