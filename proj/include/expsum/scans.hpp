#pragma once

// Randomised parameter scans over the correlation sums. Every cell draws from
// its own generator seeded by (seed, cell coordinates), so the rows do not
// depend on the number of workers.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "arith.hpp"
#include "bilinear.hpp"
#include "charsums.hpp"
#include "csv.hpp"
#include "expsums.hpp"
#include "modarith.hpp"
#include "parallel.hpp"

namespace expsum {

inline std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::int64_t> coords) {
  std::uint64_t h = seed ^ 0x9E3779B97F4A7C15ULL;
  for (std::int64_t c : coords) {
    h ^= static_cast<std::uint64_t>(c) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    h *= 0xBF58476D1CE4E5B9ULL;
    h ^= h >> 31;
  }
  return h;
}

class ScanRng {
 public:
  explicit ScanRng(std::uint64_t seed) : gen_(seed) {}

  i64 uniform(i64 lo, i64 hi) { return std::uniform_int_distribution<i64>(lo, hi)(gen_); }
  bool chance(int num, int den) { return uniform(0, den - 1) < num; }

  /// Uniform unit mod q (q >= 2).
  i64 unit(i64 q) {
    for (;;) {
      const i64 x = uniform(1, q - 1);
      if (std::gcd(x, q) == 1) return x;
    }
  }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------- C_{gamma,u}

struct PPowerRow {
  CharSumParams params;
  PPowerReport result;
};

inline std::string ppower_csv_header() {
  return "family,p,gamma,u,s1,t1,s2,t2,lam1,lam2,m,nu,regime,branch_mask,abs_sum,bound,ratio,vanishing_predicted,vanished,terms";
}

inline std::string to_csv(const PPowerRow& r) {
  const auto& c = r.params;
  const auto& b = r.result.report;
  return csv::join({"c_gamma_u", csv::num(c.pp.p), csv::num(c.pp.gamma), csv::num(c.u), csv::num(c.s1), csv::num(c.t1),
                    csv::num(c.s2), csv::num(c.t2), csv::num(c.lam1), csv::num(c.lam2), csv::num(c.m),
                    csv::num(r.result.nu), std::string(1, r.result.regime), csv::num(r.result.branch_mask),
                    csv::num(std::abs(b.sum_value)), csv::num(b.bound_value), csv::num(b.ratio),
                    csv::flag(b.vanishing_predicted), csv::flag(b.vanished), csv::num(static_cast<long>(b.term_count))});
}

/// Random admissible tuple for C_{gamma,u}. Residue t_j, repeated sides and
/// large p-adic valuations of m are favoured so that both regimes and both
/// outcomes of the vanishing test are exercised.
inline CharSumParams random_ppower_params(ScanRng& rng, const PrimePower& pp, int u) {
  const i64 q = pp.q;
  CharSumParams c;
  c.pp = pp;
  c.u = u;
  auto draw_t = [&] {
    if (rng.chance(3, 4)) {
      const i64 x = rng.unit(q);
      return mul_mod(x, x, q);
    }
    return rng.unit(q);
  };
  c.s1 = rng.unit(q);
  c.t1 = draw_t();
  c.lam1 = rng.unit(q);
  const i64 mode = rng.uniform(0, 2);
  if (mode == 0) {
    c.s2 = c.s1;
    c.t2 = c.t1;
    c.lam2 = c.lam1;
  } else if (mode == 1) {
    const i64 k = rng.unit(q);
    c.s2 = rng.unit(q);
    c.t2 = mul_mod(c.t1, mul_mod(k, k, q), q);
    c.lam2 = rng.unit(q);
  } else {
    c.s2 = rng.unit(q);
    c.t2 = draw_t();
    c.lam2 = rng.unit(q);
  }
  const int nu = static_cast<int>(rng.uniform(0, pp.gamma));
  i64 pnu = 1;
  for (int i = 0; i < nu; ++i) pnu *= pp.p;
  c.m = pnu * rng.unit(q) * (rng.chance(1, 2) ? 1 : -1);
  return c;
}

struct PPowerScanSpec {
  std::vector<i64> primes{3, 5};
  int gamma_max = 6;
  int u_max = 0;  // 0: every u with 5u <= 4 gamma
  int samples = 200;
  std::uint64_t seed = 1;
};

inline std::vector<PPowerRow> ppower_scan(const PPowerScanSpec& spec, int jobs = 1) {
  struct Cell {
    i64 p;
    int gamma, u;
  };
  std::vector<Cell> cells;
  for (i64 p : spec.primes) {
    for (int gamma = 2; gamma <= spec.gamma_max; ++gamma) {
      for (int u = 1; 5 * u <= 4 * gamma; ++u) {
        if (spec.u_max > 0 && u > spec.u_max) continue;
        cells.push_back({p, gamma, u});
      }
    }
  }
  auto chunks = parallel_map(cells.size(), jobs, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const PrimePower pp = make_prime_power(cell.p, cell.gamma);
    const KloosterTable table(pp.q);
    ScanRng rng(mix_seed(spec.seed, {1, cell.p, cell.gamma, cell.u}));
    std::vector<PPowerRow> rows;
    for (int k = 0; k < spec.samples; ++k) {
      const CharSumParams c = random_ppower_params(rng, pp, cell.u);
      rows.push_back({c, ppower_bound(c, table)});
    }
    return rows;
  });
  std::vector<PPowerRow> out;
  for (auto& c : chunks) out.insert(out.end(), c.begin(), c.end());
  return out;
}

// ------------------------------------------------------------------- C_{1,1}

struct PrimeRow {
  i64 p = 3;
  i64 s1 = 1, t1 = 1, s2 = 1, t2 = 1, lam1 = 1, lam2 = 1, m = 0;
  bool delta = false;
  BoundReport report;
};

inline std::string prime_csv_header() {
  return "family,p,s1,t1,s2,t2,lam1,lam2,m,delta,abs_sum,abs_moebius,moebius_residual,bound,ratio";
}

inline std::string to_csv(const PrimeRow& r) {
  return csv::join({"c_1_1", csv::num(r.p), csv::num(r.s1), csv::num(r.t1), csv::num(r.s2), csv::num(r.t2),
                    csv::num(r.lam1), csv::num(r.lam2), csv::num(r.m), csv::flag(r.delta),
                    csv::num(std::abs(r.report.sum_value)), csv::num(std::abs(r.report.alt_value.value_or(0.0))),
                    csv::num(r.report.alt_residual()), csv::num(r.report.bound_value), csv::num(r.report.ratio)});
}

inline std::vector<PrimeRow> prime_scan(const std::vector<i64>& primes, int tuples, std::uint64_t seed, int jobs = 1) {
  auto chunks = parallel_map(primes.size(), jobs, [&](std::size_t i) {
    const i64 p = primes[i];
    ScanRng rng(mix_seed(seed, {2, p}));
    std::vector<PrimeRow> rows;
    for (int k = 0; k < tuples; ++k) {
      PrimeRow r;
      r.p = p;
      r.s1 = rng.unit(p);
      r.t1 = rng.unit(p);
      r.lam1 = rng.unit(p);
      if (rng.chance(1, 3)) {
        // lam2 s2 = lam1 s1 and t2 = t1, so delta is active when m = 0
        r.s2 = rng.unit(p);
        r.lam2 = mul_mod(mul_mod(r.lam1, r.s1, p), inv_mod(r.s2, p), p);
        r.t2 = r.t1;
      } else {
        r.s2 = rng.unit(p);
        r.t2 = rng.unit(p);
        r.lam2 = rng.unit(p);
      }
      r.m = rng.chance(1, 3) ? 0 : rng.uniform(1, p - 1);
      r.delta = r.m == 0 && r.t1 == r.t2 && mul_mod(r.lam1, r.s1, p) == mul_mod(r.lam2, r.s2, p);
      r.report = frakC_11(p, r.s1, r.t1, r.s2, r.t2, r.lam1, r.lam2, r.m);
      rows.push_back(r);
    }
    return rows;
  });
  std::vector<PrimeRow> out;
  for (auto& c : chunks) out.insert(out.end(), c.begin(), c.end());
  return out;
}

// ---------------------------------------------------------- Dabrowski-Fisher

struct DfRow {
  PrimePower pp;
  i64 a = 1, b = 0;
  BoundReport report;
};

inline std::string df_csv_header() { return "family,p,gamma,a,b,abs_sum,bound,ratio,terms"; }

inline std::string to_csv(const DfRow& r) {
  return csv::join({"dabrowski_fisher", csv::num(r.pp.p), csv::num(r.pp.gamma), csv::num(r.a), csv::num(r.b),
                    csv::num(std::abs(r.report.sum_value)), csv::num(r.report.bound_value), csv::num(r.report.ratio),
                    csv::num(static_cast<long>(r.report.term_count))});
}

inline std::vector<DfRow> df_scan(const std::vector<PrimePower>& moduli, int samples, std::uint64_t seed, int jobs = 1) {
  auto chunks = parallel_map(moduli.size(), jobs, [&](std::size_t i) {
    const PrimePower pp = moduli[i];
    const KloosterTable table(pp.q);
    ScanRng rng(mix_seed(seed, {3, pp.p, pp.gamma}));
    std::vector<DfRow> rows;
    for (int k = 0; k < samples; ++k) {
      DfRow r;
      r.pp = pp;
      // a = 1 + p^e1 (unit), b = p^e2 (unit); e = gamma gives a = 1 or b = 0
      const i64 e1 = rng.uniform(0, pp.gamma), e2 = rng.uniform(0, pp.gamma);
      i64 pe1 = 1, pe2 = 1;
      for (i64 j = 0; j < e1; ++j) pe1 *= pp.p;
      for (i64 j = 0; j < e2; ++j) pe2 *= pp.p;
      do {
        r.a = add_mod(1, mul_mod(pe1 % pp.q, rng.uniform(0, pp.q - 1), pp.q), pp.q);
      } while (r.a % pp.p == 0);
      r.b = mul_mod(pe2 % pp.q, rng.uniform(0, pp.q - 1), pp.q);
      r.report = df_correlation(r.a, r.b, pp, table);
      rows.push_back(r);
    }
    return rows;
  });
  std::vector<DfRow> out;
  for (auto& c : chunks) out.insert(out.end(), c.begin(), c.end());
  return out;
}

// ----------------------------------------------------------------- calC, C_2

struct CalCRow {
  i64 q = 1, n1 = 1, n2 = 1, mtil = 0, b = 1;
  BoundReport report;
};

inline std::string calc_csv_header() { return "family,q,n1,n2,mtil,b,abs_sum,abs_crt,crt_residual,bound,ratio"; }

inline std::string to_csv(const CalCRow& r) {
  return csv::join({"calC", csv::num(r.q), csv::num(r.n1), csv::num(r.n2), csv::num(r.mtil), csv::num(r.b),
                    csv::num(std::abs(r.report.sum_value)), csv::num(std::abs(r.report.alt_value.value_or(0.0))),
                    csv::num(r.report.alt_residual()), csv::num(r.report.bound_value), csv::num(r.report.ratio)});
}

/// For each modulus, `samples` tuples. Half of them put n1 = n2 and m~ = 0
/// modulo a random divisor of q, which switches on the delta terms.
inline std::vector<CalCRow> calc_scan(const std::vector<i64>& moduli, int samples, std::uint64_t seed, int jobs = 1) {
  auto chunks = parallel_map(moduli.size(), jobs, [&](std::size_t i) {
    const i64 q = moduli[i];
    if (q < 2) throw InvalidArgument("calC scan needs q >= 2");
    ScanRng rng(mix_seed(seed, {4, q}));
    const auto divs = factorize(q).divisors();
    std::vector<CalCRow> rows;
    for (int k = 0; k < samples; ++k) {
      CalCRow r;
      r.q = q;
      r.n1 = rng.unit(q);
      r.b = rng.unit(q);
      if (k % 2 == 0) {
        const i64 k0 = divs[static_cast<std::size_t>(rng.uniform(0, static_cast<i64>(divs.size()) - 1))];
        do {
          r.n2 = reduce(r.n1 + k0 * rng.uniform(0, q / k0 - 1), q);
        } while (std::gcd(r.n2, q) != 1);
        r.mtil = k0 * rng.uniform(0, q / k0);
      } else {
        r.n2 = rng.unit(q);
        r.mtil = rng.uniform(0, q - 1);
      }
      r.report = calC(r.n1, r.n2, r.mtil, r.b, q);
      rows.push_back(r);
    }
    return rows;
  });
  std::vector<CalCRow> out;
  for (auto& c : chunks) out.insert(out.end(), c.begin(), c.end());
  return out;
}

struct GlueRow {
  GlueParams g;
  BoundReport report;
};

inline std::string glue_csv_header() {
  return "family,d,q,n1,n2,c1,c2,l1,l2,m2,m3,m4,b,abs_sum,abs_crt,crt_residual,bound,ratio";
}

inline std::string to_csv(const GlueRow& r) {
  const auto& g = r.g;
  return csv::join({"c2_glue", csv::num(g.d), csv::num(g.q), csv::num(g.n1), csv::num(g.n2), csv::num(g.c1),
                    csv::num(g.c2), csv::num(g.l1), csv::num(g.l2), csv::num(g.m2), csv::num(g.m3), csv::num(g.m4),
                    csv::num(g.b), csv::num(std::abs(r.report.sum_value)),
                    r.report.alt_value ? csv::num(std::abs(*r.report.alt_value)) : std::string("nan"),
                    csv::num(r.report.alt_residual()), csv::num(r.report.bound_value), csv::num(r.report.ratio)});
}

/// For each square-free modulus q >= 2 in the list (others are skipped), each
/// divisor d of q and `samples` tuples. Odd samples satisfy all three
/// congruences modulo q, hence modulo every k | d.
inline std::vector<GlueRow> glue_scan(const std::vector<i64>& requested, int samples, std::uint64_t seed, int jobs = 1) {
  std::vector<i64> moduli;
  for (i64 q : requested) {
    if (q >= 2 && factorize(q).squarefree()) moduli.push_back(q);
  }
  auto chunks = parallel_map(moduli.size(), jobs, [&](std::size_t i) {
    const i64 q = moduli[i];
    ScanRng rng(mix_seed(seed, {5, q}));
    std::vector<GlueRow> rows;
    for (i64 d : factorize(q).divisors()) {
      for (int k = 0; k < samples; ++k) {
        GlueParams g;
        g.d = d;
        g.q = q;
        g.c1 = rng.unit(q);
        g.c2 = rng.unit(q);
        g.l1 = rng.unit(q);
        g.b = rng.unit(q);
        g.m2 = rng.uniform(0, q - 1);
        if (k % 2 == 1) {
          g.n1 = rng.unit(q);
          // n2 c2^2 l1 = n1 c1^2 l2 and n2 c2 m2 = n1 c1 m3 modulo q, m4 = 0 modulo d
          g.l2 = rng.unit(q);
          g.n2 = mul_mod(mul_mod(g.n1, mul_mod(g.c1, g.c1, q), q), mul_mod(g.l2, inv_mod(mul_mod(mul_mod(g.c2, g.c2, q), g.l1, q), q), q), q);
          g.m3 = mul_mod(mul_mod(g.n2, mul_mod(g.c2, g.m2, q), q), inv_mod(mul_mod(g.c1, g.n1, q), q), q);
          g.m4 = d * rng.uniform(0, q / d);
        } else {
          g.n1 = rng.uniform(1, q);
          g.l2 = rng.unit(q);
          g.n2 = rng.uniform(1, q);
          g.m3 = rng.uniform(0, q - 1);
          g.m4 = rng.uniform(0, q - 1);
        }
        rows.push_back({g, frakC2_glue(g)});
      }
    }
    return rows;
  });
  std::vector<GlueRow> out;
  for (auto& c : chunks) out.insert(out.end(), c.begin(), c.end());
  return out;
}

// ------------------------------------------------------------------ bilinear

struct BilinearRow {
  BilinearConfig cfg;
  CancellationReport report;
};

inline std::string bilinear_csv_header() {
  return "q,p,b,M,N,n0,abs_sum,abs_grouped,path_residual,trivial_bound,exponent,thm_squarefree,thm_primepower,thm_alt,"
         "hyp_squarefree[N<=q^(1/2)(1+M/q)^-2],hyp_primepower[N<=q^(1/5)(1+M/q)^-2],hypothesis_ok";
}

inline std::string to_csv(const BilinearRow& r) {
  const auto& c = r.cfg;
  const auto& rep = r.report;
  return csv::join({csv::num(c.q), csv::num(rep.p), csv::num(c.b), csv::num(c.M), csv::num(c.N), csv::num(c.n0),
                    csv::num(std::abs(rep.sum_value)), csv::num(std::abs(rep.grouped_value)), csv::num(rep.path_residual()),
                    csv::num(rep.trivial_bound), csv::num(rep.exponent), csv::num(rep.thm_squarefree),
                    csv::num(rep.thm_primepower), csv::num(rep.thm_alt), csv::flag(rep.hyp_squarefree),
                    csv::flag(rep.hyp_primepower), csv::flag(rep.hypothesis_ok())});
}

inline std::vector<BilinearRow> bilinear_scan(const std::vector<BilinearConfig>& configs, int jobs = 1) {
  return parallel_map(configs.size(), jobs, [&](std::size_t i) { return BilinearRow{configs[i], cancellation_report(configs[i])}; });
}

/// Five shapes per modulus: M near q with N = 1, short M, M beyond q, a
/// fixed 50 x 20 box, and a longer N with small complex shifts. Even shapes
/// use alpha = 1, odd shapes random unit phases.
inline std::vector<BilinearConfig> bilinear_grid(const std::vector<i64>& moduli, std::uint64_t seed) {
  std::vector<BilinearConfig> grid;
  for (i64 q : moduli) {
    ScanRng rng(mix_seed(seed, {13, q}));
    const i64 shapes[5][2] = {{q, 1}, {std::max<i64>(q / 4, 2), 4}, {2 * q, 3}, {50, 20}, {q, 8}};
    for (int s = 0; s < 5; ++s) {
      BilinearConfig c;
      c.q = q;
      c.b = q == 1 ? 1 : rng.unit(q);
      c.M = std::max<i64>(shapes[s][0], 2);
      c.N = shapes[s][1];
      c.n0 = rng.uniform(1, 100);
      if (s % 2 == 1) {
        for (i64 k = 0; k < c.N; ++k) c.alpha.push_back(unit_root(rng.uniform(0, 999), 1000));
      }
      if (s == 4) {
        c.w = {0.01, -0.02};
        c.s1 = {0.0, 0.03};
        c.s2 = {-0.01, 0.01};
      }
      grid.push_back(c);
    }
  }
  return grid;
}

inline const std::vector<i64>& bilinear_grid_moduli(bool quick) {
  static const std::vector<i64> full{1, 7, 27, 49, 101, 210, 343, 1009, 1155, 2401};
  static const std::vector<i64> reduced{1, 7, 27, 49, 210};
  return quick ? reduced : full;
}

}  // namespace expsum
