// A short tour: one Kloosterman sum three ways, a hyper-Kloosterman value, a
// vanishing correlation sum, one Voronoi residual and a d_3 progression.

#include <cstdio>

#include <expsum/expsum.hpp>

using namespace expsum;

int main() {
  const PrimePower pp = make_prime_power(5, 3);
  const i64 beta = 6;
  std::printf("S(1, %lld; %lld): direct %.12f, explicit %.12f, CRT %.12f\n", static_cast<long long>(beta),
              static_cast<long long>(pp.q), kloosterman_direct(1, beta, pp.q).real(),
              kloosterman_explicit_pp(beta, pp).real(), kloosterman_split(1, beta, pp.q).real());

  const ComplexVal k3 = hyper_kl3(2, 35);
  std::printf("Kl3~(2, 35) = %.12f %+.12fi, |.| = %.6f\n", k3.real(), k3.imag(), std::abs(k3));

  CharSumParams prm;
  prm.pp = make_prime_power(3, 5);
  prm.u = 4;
  prm.m = 3;
  const PPowerReport rep = ppower_bound(prm);
  std::printf("c_{5,4} at p = 3: regime %c, |sum| = %.3e, bound %.3e, vanishing predicted %d\n", rep.regime,
              std::abs(rep.report.sum_value), rep.report.bound_value, rep.report.vanishing_predicted ? 1 : 0);

  const VoronoiReport v = voronoi_residual(2, 5, SmoothWeight(50.0));
  std::printf("Voronoi a=2 q=5 X=50: lhs %.10f, main %.10f, dual %.10f, N_max %lld, relative residual %.2e\n",
              v.lhs.real(), v.rhs_main.real(), v.rhs_dual.real(), static_cast<long long>(v.N_max), v.relative_residual());

  const i64 X = 100'000, q = 7;
  const DivisorTable d3t = divisor_table(3, X);
  for (const auto& row : ap_discrepancies(d3t, X, q)) {
    std::printf("X=%lld q=%lld a=%lld: sum %s, mean %s, delta %.4f\n", static_cast<long long>(X),
                static_cast<long long>(q), static_cast<long long>(row.a), to_string(row.ap_sum).c_str(),
                to_string(row.coprime_mean).c_str(), row.delta);
  }
  return 0;
}
