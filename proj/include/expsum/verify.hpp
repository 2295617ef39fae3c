#pragma once

// The invariant battery behind `verify-all` and the acceptance binary. Each
// check returns a one-line verdict whose detail string depends only on the
// computed values, never on timing or scheduling.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "arith.hpp"
#include "bilinear.hpp"
#include "charsums.hpp"
#include "distribution.hpp"
#include "expsums.hpp"
#include "parallel.hpp"
#include "scans.hpp"
#include "voronoi.hpp"

namespace expsum {

struct VerifyOptions {
  bool quick = false;
  int jobs = 1;
  std::uint64_t seed = 1;
};

struct CheckResult {
  std::string id;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string sci(double v) { return fmt("%.3e", v); }

}  // namespace detail

/// Explicit prime-power formula against the defining sum, every unit beta.
/// The defining sum is evaluated for all beta at once as a DFT, and for
/// moduli up to 5e4 also by the plain loop on a sample of beta.
inline CheckResult check_explicit_formula(const VerifyOptions& opt) {
  const i64 cap = opt.quick ? 20'000 : 1'000'000;
  std::vector<PrimePower> moduli;
  for (i64 p : {3, 5, 7, 11, 13}) {
    for (int g = 2;; ++g) {
      const PrimePower pp = make_prime_power(p, g);
      if (pp.q > cap) break;
      moduli.push_back(pp);
    }
  }
  struct Out {
    double worst = 0.0;
    long zeros = 0, zero_fail = 0, count = 0;
  };
  auto outs = parallel_map(moduli.size(), opt.jobs, [&](std::size_t i) {
    const PrimePower pp = moduli[i];
    const auto ref = kloosterman_transform(1, pp.q);
    Out o;
    for (i64 beta = 1; beta < pp.q; ++beta) {
      if (beta % pp.p == 0) continue;
      const ComplexVal e = kloosterman_explicit_pp(beta, pp);
      const ComplexVal d = ref[static_cast<std::size_t>(beta)];
      ++o.count;
      o.worst = std::max(o.worst, std::abs(e - d) / std::max(std::abs(d), 1.0));
      if (legendre(beta, pp.p) == -1) {
        ++o.zeros;
        if (e != ComplexVal{0.0, 0.0} || std::abs(d) > 1e-9 * std::sqrt(static_cast<double>(pp.q))) ++o.zero_fail;
      }
    }
    if (pp.q <= 50'000) {
      ScanRng rng(mix_seed(opt.seed, {11, pp.p, pp.gamma}));
      for (int k = 0; k < 16; ++k) {
        const i64 beta = rng.unit(pp.q);
        const ComplexVal d = kloosterman_direct(1, beta, pp.q);
        o.worst = std::max(o.worst, std::abs(kloosterman_explicit_pp(beta, pp) - d) / std::max(std::abs(d), 1.0));
      }
    }
    return o;
  });
  Out total;
  for (const auto& o : outs) {
    total.worst = std::max(total.worst, o.worst);
    total.zeros += o.zeros;
    total.zero_fail += o.zero_fail;
    total.count += o.count;
  }
  const bool pass = total.worst <= 1e-9 && total.zero_fail == 0;
  return {"explicit_kloosterman", pass,
          std::to_string(moduli.size()) + " moduli, " + std::to_string(total.count) + " beta, max rel err " +
              detail::sci(total.worst) + ", nonresidue zeros " + std::to_string(total.zeros - total.zero_fail) + "/" +
              std::to_string(total.zeros)};
}

inline CheckResult check_sigma00(const VerifyOptions& opt) {
  const i64 bound = opt.quick ? 100 : 500;
  long mismatches = 0;
  for (i64 k = 1; k <= bound; ++k) {
    for (i64 l = 1; l <= bound; ++l) {
      if (sigma00_enumerated(k, l) != sigma00_convolution(k, l)) ++mismatches;
    }
  }
  return {"sigma00_identity", mismatches == 0,
          "1 <= k, l <= " + std::to_string(bound) + ", mismatches " + std::to_string(mismatches)};
}

/// Kloosterman CRT splitting and the two hyper-Kloosterman paths.
inline CheckResult check_crt_and_hyper(const VerifyOptions& opt) {
  const i64 all_m_bound = opt.quick ? 60 : 500;
  const i64 composite_bound = opt.quick ? 500 : 10'000;
  std::vector<i64> small;
  for (i64 q = 1; q <= all_m_bound; ++q) small.push_back(q);
  auto small_out = parallel_map(small.size(), opt.jobs, [&](std::size_t i) {
    const i64 q = small[i];
    double worst = 0.0;
    const auto direct = hyper_kl3_direct_all(q);
    const HyperKl3Table table(q);
    for (i64 m = 0; m < q; ++m) worst = std::max(worst, std::abs(direct[static_cast<std::size_t>(m)] - table[m]) / static_cast<double>(q));
    // Kloosterman CRT for three values of a and every b.
    int used = 0;
    for (i64 a = 1; a < std::max<i64>(q, 2) && used < 3; ++a) {
      if (std::gcd(a, q) != 1) continue;
      ++used;
      const auto row = kloosterman_transform(a, q);
      for (i64 b = 0; b < q; ++b) {
        worst = std::max(worst, std::abs(kloosterman_split(a, b, q) - row[static_cast<std::size_t>(b)]) / static_cast<double>(q));
      }
    }
    return worst;
  });
  std::vector<i64> composite;
  for (i64 q = 4; q <= composite_bound; ++q) {
    if (!is_prime(q)) composite.push_back(q);
  }
  auto comp_out = parallel_map(composite.size(), opt.jobs, [&](std::size_t i) {
    const i64 q = composite[i];
    ScanRng rng(mix_seed(opt.seed, {12, q}));
    const KloosterTable table(q);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const i64 a = rng.uniform(0, q - 1), b = rng.uniform(0, q - 1);
      worst = std::max(worst, std::abs(kloosterman_split(a, b, q) - kloosterman_direct(a, b, q)) / static_cast<double>(q));
    }
    // one m per modulus through both hyper-Kloosterman paths
    const i64 m = rng.uniform(0, q - 1);
    worst = std::max(worst, std::abs(hyper_kl3_fast(m, table) - HyperKl3Table(table)[m]) / static_cast<double>(q));
    return worst;
  });
  double worst = 0.0;
  for (double w : small_out) worst = std::max(worst, w);
  for (double w : comp_out) worst = std::max(worst, w);
  return {"crt_and_hyper_kloosterman", worst <= 1e-9,
          "q <= " + std::to_string(all_m_bound) + " all m, composite q <= " + std::to_string(composite_bound) +
              " sampled; max |difference|/q " + detail::sci(worst)};
}

inline CheckResult check_weil(const VerifyOptions& opt) {
  const WeilAuditReport rep = weil_audit(opt.quick ? 60 : 200);
  return {"weil_deligne_audit", rep.ok(),
          "p <= " + std::to_string(rep.prime_bound) + ", max |S|/(2 sqrt p) " + detail::fmt("%.9f", rep.max_kloosterman_ratio) +
              " (p=" + std::to_string(rep.worst_kloosterman_prime) + "), max |Kl3~| " + detail::fmt("%.9f", rep.max_kl3_abs) +
              " (p=" + std::to_string(rep.worst_kl3_prime) + ")"};
}

inline CheckResult check_ppower(const VerifyOptions& opt) {
  PPowerScanSpec spec;
  spec.gamma_max = opt.quick ? 4 : 6;
  spec.samples = opt.quick ? 40 : 200;
  spec.seed = opt.seed;
  const auto rows = ppower_scan(spec, opt.jobs);
  long predicted = 0, violations = 0;
  double max_ratio = 0.0, worst_vanish = 0.0;
  for (const auto& r : rows) {
    const auto& rep = r.result.report;
    if (r.result.regime == 'B' && rep.vanishing_predicted) {
      ++predicted;
      const double scale = std::pow(static_cast<double>(r.params.pp.p), 2 * r.params.u);
      const double rel = std::abs(rep.sum_value) / scale;
      worst_vanish = std::max(worst_vanish, rel);
      if (rel > 1e-6) ++violations;
    }
    if (rep.bound_value > 0.0) max_ratio = std::max(max_ratio, rep.ratio);
  }
  const bool pass = violations == 0 && max_ratio <= 16.0;
  return {"c_gamma_u_sums", pass,
          std::to_string(rows.size()) + " tuples, " + std::to_string(predicted) + " predicted vanishing, max |c|/p^(2u) " +
              detail::sci(worst_vanish) + ", max ratio " + detail::fmt("%.4f", max_ratio)};
}

inline CheckResult check_prime(const VerifyOptions& opt) {
  std::vector<i64> primes;
  for (i64 p = 3; p <= (opt.quick ? 13 : 31); ++p) {
    if (is_prime(p)) primes.push_back(p);
  }
  const auto rows = prime_scan(primes, opt.quick ? 20 : 50, opt.seed, opt.jobs);
  double worst = 0.0, max_ratio = 0.0;
  for (const auto& r : rows) {
    worst = std::max(worst, r.report.alt_residual() / static_cast<double>(r.p * r.p));
    max_ratio = std::max(max_ratio, r.report.ratio);
  }
  return {"c_1_1_moebius", worst <= 1e-6 && max_ratio <= 16.0,
          std::to_string(rows.size()) + " tuples, max |direct - reduced|/p^2 " + detail::sci(worst) + ", max ratio " +
              detail::fmt("%.4f", max_ratio)};
}

inline CheckResult check_df(const VerifyOptions& opt) {
  std::vector<PrimePower> moduli;
  for (int g = 1; g <= 6; ++g) moduli.push_back(make_prime_power(3, g));
  for (int g = 1; g <= 4; ++g) moduli.push_back(make_prime_power(5, g));
  for (int g = 1; g <= 3; ++g) moduli.push_back(make_prime_power(7, g));
  const auto rows = df_scan(moduli, opt.quick ? 20 : 100, opt.seed, opt.jobs);
  double max_ratio = 0.0;
  for (const auto& r : rows) max_ratio = std::max(max_ratio, r.report.ratio);
  const ComplexVal spot = df_correlation(1, 0, make_prime_power(5, 1)).sum_value;
  const bool spot_ok = std::abs(spot - ComplexVal{19.0, 0.0}) <= 1e-6;
  return {"dabrowski_fisher", max_ratio <= 16.0 && spot_ok,
          std::to_string(rows.size()) + " (a,b), max ratio " + detail::fmt("%.4f", max_ratio) + ", sum*|S(1,x;5)|^2 = " +
              detail::fmt("%.9f", spot.real())};
}

inline CheckResult check_calc_glue(const VerifyOptions& opt) {
  std::vector<i64> moduli;
  for (i64 q = 2; q <= (opt.quick ? 60 : 200); ++q) moduli.push_back(q);
  const auto crows = calc_scan(moduli, opt.quick ? 2 : 4, opt.seed, opt.jobs);
  const auto grows = glue_scan(moduli, opt.quick ? 1 : 2, opt.seed, opt.jobs);
  double worst = 0.0, max_ratio = 0.0;
  long delta_mismatch = 0;
  for (const auto& r : crows) {
    worst = std::max(worst, r.report.alt_residual() / (static_cast<double>(r.q) * r.q));
    max_ratio = std::max(max_ratio, r.report.ratio);
    // the divisors k | q with k | n1 - n2 and k | mtil are the divisors of one gcd
    const i64 g = std::gcd(std::gcd(r.q, reduce(r.n1 - r.n2, r.q)), reduce(r.mtil, r.q));
    double weight = 0.0;
    for (i64 k : factorize(g).divisors()) weight += std::sqrt(static_cast<double>(k));
    if (std::fabs(weight * std::pow(static_cast<double>(r.q), 1.5) - r.report.bound_value) > 1e-9 * r.report.bound_value) ++delta_mismatch;
  }
  for (const auto& r : grows) {
    worst = std::max(worst, r.report.alt_residual() / (static_cast<double>(r.g.q) * r.g.q));
    max_ratio = std::max(max_ratio, r.report.ratio);
  }
  return {"calC_and_glue", worst <= 1e-6 && max_ratio <= 16.0 && delta_mismatch == 0,
          std::to_string(crows.size()) + " calC + " + std::to_string(grows.size()) + " glue tuples, max CRT residual/q^2 " +
              detail::sci(worst) + ", max ratio " + detail::fmt("%.4f", max_ratio)};
}

inline CheckResult check_voronoi(const VerifyOptions& opt) {
  struct Cell {
    i64 q;
    double X;
  };
  std::vector<Cell> cells;
  const std::vector<double> scales = opt.quick ? std::vector<double>{50.0} : std::vector<double>{50.0, 100.0, 200.0};
  for (double X : scales) {
    for (i64 q = 1; q <= (opt.quick ? 6 : 20); ++q) cells.push_back({q, X});
  }
  struct Out {
    double worst = 0.0, half_log_best = INFINITY;
    long count = 0;
  };
  auto outs = parallel_map(cells.size(), opt.jobs, [&](std::size_t i) {
    VoronoiKernelCache cache;
    Out o;
    for (i64 a = 1; a <= cells[i].q; ++a) {
      if (std::gcd(a, cells[i].q) != 1) continue;
      const auto rep = voronoi_residual(a, cells[i].q, SmoothWeight(cells[i].X), std::nullopt, cache);
      o.worst = std::max(o.worst, rep.relative_residual());
      o.half_log_best = std::min(o.half_log_best, rep.half_log_residual / std::abs(rep.lhs));
      ++o.count;
    }
    return o;
  });
  Out total;
  for (const auto& o : outs) {
    total.worst = std::max(total.worst, o.worst);
    total.half_log_best = std::min(total.half_log_best, o.half_log_best);
    total.count += o.count;
  }
  return {"voronoi_divisor", total.worst <= 1e-6,
          std::to_string(total.count) + " (a,q,X), max relative residual " + detail::sci(total.worst) +
              "; with log(sqrt(x)/q)+gamma main term min relative residual " + detail::sci(total.half_log_best)};
}

inline CheckResult check_distribution(const VerifyOptions& opt) {
  const i64 X = opt.quick ? 20'000 : 1'000'000;
  const DivisorTable d3t = divisor_table(3, X);
  std::vector<i64> moduli;
  for (i64 q = 1; q <= 200; ++q) {
    if (factorize(q).squarefree()) moduli.push_back(q);
  }
  for (i64 q : {9, 27, 81, 243}) moduli.push_back(q);
  struct Out {
    bool zero_sum = true;
    double worst = 0.0;
  };
  auto outs = parallel_map(moduli.size(), opt.jobs, [&](std::size_t i) {
    const i64 q = moduli[i];
    Out o;
    o.zero_sum = delta_total(ap_discrepancies(d3t, X, q)).num == 0;
    const auto sums = d3_class_sums(d3t, X, q);
    for (i64 a = 1; a <= q; ++a) {
      if (std::gcd(a, q) != 1) continue;
      o.worst = std::max(o.worst, ramanujan_decomposition(sums, X, q, a).residual());
    }
    return o;
  });
  long zero_fail = 0;
  double worst = 0.0;
  for (const auto& o : outs) {
    zero_fail += o.zero_sum ? 0 : 1;
    worst = std::max(worst, o.worst);
  }
  // sieve against the triple loop over a b c <= Y
  const i64 Y = 10'000;
  std::vector<std::uint32_t> oracle(static_cast<std::size_t>(Y + 1), 0);
  for (i64 a = 1; a <= Y; ++a) {
    for (i64 b = 1; a * b <= Y; ++b) {
      for (i64 c = 1; a * b * c <= Y; ++c) ++oracle[static_cast<std::size_t>(a * b * c)];
    }
  }
  long sieve_fail = 0;
  for (i64 n = 1; n <= Y; ++n) sieve_fail += oracle[static_cast<std::size_t>(n)] != d3t(n) ? 1 : 0;
  const bool pass = zero_fail == 0 && worst <= 1e-6 && sieve_fail == 0;
  return {"distribution_identities", pass,
          "X=" + std::to_string(X) + ", " + std::to_string(moduli.size()) + " moduli, zero-sum failures " +
              std::to_string(zero_fail) + ", max decomposition residual " + detail::sci(worst) + ", sieve mismatches " +
              std::to_string(sieve_fail)};
}

inline CheckResult check_bilinear(const VerifyOptions& opt) {
  const auto rows = bilinear_scan(bilinear_grid(bilinear_grid_moduli(opt.quick), opt.seed), opt.jobs);
  double worst = 0.0;
  long over = 0, flagged = 0;
  for (const auto& row : rows) {
    const auto& r = row.report;
    worst = std::max(worst, r.path_residual() / std::max(std::abs(r.sum_value), 1e-300));
    over += r.within_trivial() ? 0 : 1;
    flagged += r.hypothesis_ok() ? 1 : 0;
  }
  return {"bilinear_paths", worst <= 1e-9 && over == 0,
          std::to_string(rows.size()) + " configs, max relative path difference " + detail::sci(worst) +
              ", trivial bound exceeded " + std::to_string(over) + ", hypothesis satisfied in " + std::to_string(flagged)};
}

/// Every check of the battery, in a fixed order.
inline std::vector<std::function<CheckResult(const VerifyOptions&)>> all_checks() {
  return {check_explicit_formula, check_sigma00,       check_crt_and_hyper, check_weil,
          check_ppower,           check_prime,         check_df,            check_calc_glue,
          check_voronoi,          check_distribution,  check_bilinear};
}

}  // namespace expsum
