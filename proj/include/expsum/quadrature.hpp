#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace expsum {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
inline GaussRule make_gauss_rule(int n) {
  if (n < 1) throw InvalidArgument("Gauss rule needs n >= 1");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    long double x = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (n + 0.5L));
    long double dp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1.0L, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0L;
      dp = n * (x * p1 - p0) / (x * x - 1.0L);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    const double w = static_cast<double>(2.0L / ((1.0L - x * x) * dp * dp));
    rule.nodes[static_cast<std::size_t>(i)] = static_cast<double>(-x);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(x);
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

/// Cached rule; rules are immutable once built.
inline const GaussRule& gauss_rule(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_rule(n)).first;
  return it->second;
}

template <class F>
auto gauss_panel(const F& f, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  decltype(f(a)) sum{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

/// Composite rule with `panels` equal panels of `n` nodes each.
template <class F>
auto gauss_composite(const F& f, double a, double b, int panels, int n) {
  const GaussRule& rule = gauss_rule(n);
  decltype(f(a)) sum{};
  const double width = (b - a) / panels;
  for (int k = 0; k < panels; ++k) sum += gauss_panel(f, a + k * width, a + (k + 1) * width, rule);
  return sum;
}

namespace detail {

template <class F>
double adaptive_step(const F& f, double a, double b, double whole, double abs_tol, int depth, const GaussRule& rule) {
  const double mid = 0.5 * (a + b);
  const double left = gauss_panel(f, a, mid, rule);
  const double right = gauss_panel(f, mid, b, rule);
  if (depth <= 0 || std::fabs(left + right - whole) <= abs_tol) return left + right;
  return adaptive_step(f, a, mid, left, 0.5 * abs_tol, depth - 1, rule) +
         adaptive_step(f, mid, b, right, 0.5 * abs_tol, depth - 1, rule);
}

}  // namespace detail

/// Adaptive bisection with a 20-point Gauss-Legendre rule on each piece. The
/// starting partition has `initial` panels; refinement stops when halving a
/// panel changes it by less than its share of rel_tol * |integral|.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double rel_tol = 1e-12, int initial = 8) {
  const GaussRule& rule = gauss_rule(20);
  std::vector<double> pieces(static_cast<std::size_t>(initial));
  const double width = (b - a) / initial;
  double scale = 0.0;
  for (int k = 0; k < initial; ++k) {
    pieces[static_cast<std::size_t>(k)] = gauss_panel(f, a + k * width, a + (k + 1) * width, rule);
    scale += std::fabs(pieces[static_cast<std::size_t>(k)]);
  }
  const double tol = rel_tol * std::max(scale, 1e-300) / initial;
  double total = 0.0;
  for (int k = 0; k < initial; ++k) {
    total += detail::adaptive_step(f, a + k * width, a + (k + 1) * width, pieces[static_cast<std::size_t>(k)], tol, 30, rule);
  }
  return total;
}

}  // namespace expsum
