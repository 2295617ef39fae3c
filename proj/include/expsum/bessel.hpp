#pragma once

// Bessel functions Y0 and K0 for positive real arguments. Small arguments use
// the ascending series in long double; large arguments use the asymptotic
// expansions truncated at the smallest term.

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace expsum {

inline constexpr long double kEulerGamma = 0.57721566490153286060651209008240243L;

/// Switch points between series and asymptotic branches.
inline constexpr double kY0SeriesLimit = 12.0;
inline constexpr double kK0SeriesLimit = 8.0;

namespace detail {

// sum_k s_k (x^2/4)^k / (k!)^2 with s_k = 1 (sum_i) and s_k = H_k (sum_h).
struct AscendingSums {
  long double plain = 0.0L;
  long double harmonic = 0.0L;
};

inline AscendingSums ascending_sums(long double x, bool alternating) {
  const long double z = x * x / 4.0L;
  AscendingSums out{1.0L, 0.0L};
  long double term = 1.0L, h = 0.0L;
  for (int k = 1; k < 200; ++k) {
    term *= z / (static_cast<long double>(k) * k);
    if (alternating) term = -term;
    h += 1.0L / k;
    out.plain += term;
    out.harmonic += h * term;
    if (std::fabs(term) * (h + 1.0L) < 1e-22L * (std::fabs(out.plain) + std::fabs(out.harmonic))) break;
  }
  return out;
}

inline void require_positive(double x, const char* name) {
  if (!(x > 0.0)) throw NonPositiveArgument(std::string(name) + " requires x > 0, got " + std::to_string(x));
}

}  // namespace detail

/// Y0 by the ascending series (2/pi)[(log(x/2) + gamma) J0(x) - sum (-z)^k H_k / (k!)^2], z = x^2/4.
inline double bessel_y0_series(double x) {
  detail::require_positive(x, "bessel_y0");
  const auto s = detail::ascending_sums(x, true);
  const long double lead = (std::log(static_cast<long double>(x) / 2.0L) + kEulerGamma) * s.plain;
  return static_cast<double>(2.0L / std::numbers::pi_v<long double> * (lead - s.harmonic));
}

/// Y0 by the Hankel expansion sqrt(2/(pi x)) (P sin chi + Q cos chi), chi = x - pi/4.
inline double bessel_y0_asymptotic(double x) {
  detail::require_positive(x, "bessel_y0");
  const long double xl = x;
  long double P = 0.0L, Q = 0.0L;
  // a_k = prod_{j=1..k} (-(2j-1)^2) / (k! (8x)^k); P = sum (-1)^j a_{2j}, Q = sum (-1)^j a_{2j+1}.
  long double a = 1.0L, prev = INFINITY;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) a *= -static_cast<long double>((2 * k - 1) * (2 * k - 1)) / (k * 8.0L * xl);
    if (std::fabs(a) > prev) break;
    prev = std::fabs(a);
    const long double signed_term = ((k / 2) % 2 == 0 ? 1.0L : -1.0L) * a;
    if (k % 2 == 0) {
      P += signed_term;
    } else {
      Q += signed_term;
    }
  }
  const long double chi = xl - std::numbers::pi_v<long double> / 4.0L;
  return static_cast<double>(std::sqrt(2.0L / (std::numbers::pi_v<long double> * xl)) *
                             (P * std::sin(chi) + Q * std::cos(chi)));
}

inline double bessel_y0(double x) { return x <= kY0SeriesLimit ? bessel_y0_series(x) : bessel_y0_asymptotic(x); }

/// K0 by -(log(x/2) + gamma) I0(x) + sum z^k H_k / (k!)^2, z = x^2/4.
inline double bessel_k0_series(double x) {
  detail::require_positive(x, "bessel_k0");
  const auto s = detail::ascending_sums(x, false);
  return static_cast<double>(-(std::log(static_cast<long double>(x) / 2.0L) + kEulerGamma) * s.plain + s.harmonic);
}

/// K0 by e^{-x} sqrt(pi/(2x)) sum_k prod_{j<=k} (-(2j-1)^2) / (k! (8x)^k).
inline double bessel_k0_asymptotic(double x) {
  detail::require_positive(x, "bessel_k0");
  const long double xl = x;
  long double sum = 0.0L, a = 1.0L, prev = INFINITY;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) a *= -static_cast<long double>((2 * k - 1) * (2 * k - 1)) / (k * 8.0L * xl);
    if (std::fabs(a) > prev) break;
    prev = std::fabs(a);
    sum += a;
  }
  return static_cast<double>(std::exp(-xl) * std::sqrt(std::numbers::pi_v<long double> / (2.0L * xl)) * sum);
}

inline double bessel_k0(double x) {
  if (x > 700.0) {
    detail::require_positive(x, "bessel_k0");
    return 0.0;
  }
  return x <= kK0SeriesLimit ? bessel_k0_series(x) : bessel_k0_asymptotic(x);
}

}  // namespace expsum
