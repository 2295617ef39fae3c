#pragma once

// Command-line driver. `run` parses argv, merges an optional JSON config with
// the flags (flags win), executes one subcommand and writes a CSV or JSON
// table. Exit codes: 0 success, 1 an invariant failed, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "arith.hpp"
#include "bilinear.hpp"
#include "charsums.hpp"
#include "csv.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "expsums.hpp"
#include "parallel.hpp"
#include "scans.hpp"
#include "verify.hpp"
#include "voronoi.hpp"

namespace expsum::cli {

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"kloosterman", "hyperkl3", "charsum-pp", "charsum-prime", "df",      "calC",
                                              "glue",        "voronoi",  "bilinear",   "distribution",  "verify-all"};
  return names;
}

/// Upper limits on every range, chosen so a single run stays within minutes
/// and a few hundred MB.
struct Caps {
  static constexpr i64 kPrime = 1000;
  static constexpr int kGamma = 12;
  static constexpr i64 kPrimePowerModulus = 1'000'000;
  static constexpr i64 kKloostermanModulus = 100'000;
  static constexpr i64 kHyperModulus = 5'000;
  static constexpr i64 kCharsumModulus = 2'000;
  static constexpr i64 kVoronoiModulus = 50;
  static constexpr i64 kVoronoiX = 1'000;
  static constexpr i64 kBilinearModulus = 10'000;
  static constexpr i64 kBilinearM = 1'000'000;
  static constexpr i64 kBilinearN = 10'000;
  static constexpr i64 kDistributionX = 10'000'000;
  static constexpr int kSamples = 100'000;
  static constexpr int kJobs = 256;
};

struct RunConfig {
  std::string subcommand;
  std::vector<i64> p, q, X, M, N;
  int gamma_max = 6;
  int u_max = 0;
  std::string out;
  std::string format = "csv";
  int jobs = 1;
  std::optional<double> tol;
  bool quick = false;
  std::uint64_t seed = 1;
  std::optional<int> samples;
};

/// "1..20,30,40..42" -> {1, ..., 20, 30, 40, 41, 42}, order preserved.
inline std::vector<i64> parse_range_list(const std::string& text) {
  std::vector<i64> out;
  std::stringstream ss(text);
  std::string item;
  auto to_int = [&](const std::string& s) -> i64 {
    std::size_t used = 0;
    i64 v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      throw ParseError("not an integer: '" + s + "'");
    }
    if (used != s.size()) throw ParseError("not an integer: '" + s + "'");
    return v;
  };
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw ParseError("empty item in list '" + text + "'");
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(item));
      continue;
    }
    const i64 lo = to_int(item.substr(0, dots)), hi = to_int(item.substr(dots + 2));
    if (hi < lo) throw ParseError("empty range '" + item + "'");
    if (hi - lo > 10'000'000) throw ValidationError("range '" + item + "' is too long");
    for (i64 v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw ParseError("empty list");
  return out;
}

namespace detail {

inline std::vector<i64> json_list(const nlohmann::json& v, const std::string& key) {
  if (v.is_number_integer()) return {v.get<i64>()};
  if (v.is_string()) return parse_range_list(v.get<std::string>());
  if (v.is_array()) {
    std::vector<i64> out;
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw ValidationError("'" + key + "' must hold integers");
      out.push_back(e.get<i64>());
    }
    return out;
  }
  throw ValidationError("'" + key + "' must be an integer, a list of integers or a range string");
}

template <class T>
T json_scalar(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("'" + key + "' has the wrong type");
  }
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

inline void check_all(const std::vector<i64>& v, i64 lo, i64 hi, const std::string& name) {
  for (i64 x : v) require(x >= lo && x <= hi, name + " = " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace detail

/// Range checks shared by configs and flags.
inline void validate(const RunConfig& c) {
  using detail::check_all;
  using detail::require;
  const auto& names = subcommands();
  require(std::find(names.begin(), names.end(), c.subcommand) != names.end(), "unknown subcommand '" + c.subcommand + "'");
  require(c.format == "csv" || c.format == "json", "format must be csv or json");
  require(c.jobs >= 1 && c.jobs <= Caps::kJobs, "jobs must lie in [1, " + std::to_string(Caps::kJobs) + "]");
  require(c.gamma_max >= 1 && c.gamma_max <= Caps::kGamma, "gamma_max must lie in [1, " + std::to_string(Caps::kGamma) + "]");
  require(c.u_max >= 0 && c.u_max <= c.gamma_max, "u_max must lie in [0, gamma_max]");
  if (c.tol) {
    require(std::isfinite(*c.tol) && *c.tol >= std::numeric_limits<double>::epsilon() && *c.tol < 1.0,
            "tol must lie in [machine epsilon, 1)");
  }
  if (c.samples) require(*c.samples >= 1 && *c.samples <= Caps::kSamples, "samples must lie in [1, " + std::to_string(Caps::kSamples) + "]");
  check_all(c.p, 3, Caps::kPrime, "p");
  for (i64 p : c.p) require(is_prime(p), "p = " + std::to_string(p) + " is not an odd prime");
  if (c.subcommand == "charsum-pp" || c.subcommand == "df") {
    for (i64 p : c.p) {
      double size = 1.0;
      for (int g = 0; g < c.gamma_max; ++g) size *= static_cast<double>(p);
      require(size <= static_cast<double>(Caps::kPrimePowerModulus), "p^gamma_max exceeds " + std::to_string(Caps::kPrimePowerModulus));
    }
  }
  if (c.subcommand == "kloosterman") check_all(c.q, 1, Caps::kKloostermanModulus, "q");
  if (c.subcommand == "hyperkl3") check_all(c.q, 1, Caps::kHyperModulus, "q");
  if (c.subcommand == "calC" || c.subcommand == "glue") check_all(c.q, 2, Caps::kCharsumModulus, "q");
  if (c.subcommand == "voronoi") {
    check_all(c.q, 1, Caps::kVoronoiModulus, "q");
    check_all(c.X, 1, Caps::kVoronoiX, "X");
  }
  if (c.subcommand == "bilinear") {
    check_all(c.q, 1, Caps::kBilinearModulus, "q");
    check_all(c.M, 1, Caps::kBilinearM, "M");
    check_all(c.N, 1, Caps::kBilinearN, "N");
  }
  if (c.subcommand == "distribution") {
    check_all(c.X, 1, Caps::kDistributionX, "X");
    require(c.X.size() <= 1, "distribution takes a single X");
    const i64 X = c.X.empty() ? 100'000 : c.X.front();
    check_all(c.q, 1, X, "q");
  }
}

/// Reads a JSON object. Keys: subcommand, p, q, X, M, N (integer, list or
/// range string), gamma_max, u_max, out, format, jobs, tol, quick, seed,
/// samples. Missing keys keep their defaults; any other key is rejected.
inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON in '") + path + "': " + e.what());
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  RunConfig c;
  c.subcommand = "verify-all";
  for (const auto& [key, v] : j.items()) {
    if (key == "subcommand") c.subcommand = detail::json_scalar<std::string>(v, key);
    else if (key == "p") c.p = detail::json_list(v, key);
    else if (key == "q") c.q = detail::json_list(v, key);
    else if (key == "X") c.X = detail::json_list(v, key);
    else if (key == "M") c.M = detail::json_list(v, key);
    else if (key == "N") c.N = detail::json_list(v, key);
    else if (key == "gamma_max") c.gamma_max = detail::json_scalar<int>(v, key);
    else if (key == "u_max") c.u_max = detail::json_scalar<int>(v, key);
    else if (key == "out") c.out = detail::json_scalar<std::string>(v, key);
    else if (key == "format") c.format = detail::json_scalar<std::string>(v, key);
    else if (key == "jobs") c.jobs = detail::json_scalar<int>(v, key);
    else if (key == "tol") c.tol = detail::json_scalar<double>(v, key);
    else if (key == "quick") c.quick = detail::json_scalar<bool>(v, key);
    else if (key == "seed") c.seed = detail::json_scalar<std::uint64_t>(v, key);
    else if (key == "samples") c.samples = detail::json_scalar<int>(v, key);
    else throw ValidationError("unknown config key '" + key + "'");
  }
  validate(c);
  return c;
}

/// A table of preformatted cells: CSV rows, or a JSON array of objects.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void set_header(const std::string& line) { header = split(line); }
  void add(const std::string& line) { rows.push_back(split(line)); }

  static std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  }

  void write(std::ostream& os, const std::string& format) const {
    if (format == "csv") {
      os << csv::join(header) << '\n';
      for (const auto& r : rows) os << csv::join(r) << '\n';
      return;
    }
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < header.size() && i < r.size(); ++i) obj[header[i]] = cell_value(r[i]);
      arr.push_back(std::move(obj));
    }
    os << arr.dump(1) << '\n';
  }

  static nlohmann::ordered_json cell_value(const std::string& s) {
    if (s.empty()) return nullptr;
    std::size_t used = 0;
    try {
      if (s.find_first_of(".eE") == std::string::npos) {
        const long long v = std::stoll(s, &used);
        if (used == s.size()) return v;
      } else {
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return v;
      }
    } catch (const std::exception&) {
    }
    return s;
  }
};

struct Outcome {
  Table table;
  long failures = 0;
  std::vector<std::string> messages;  // written to stderr
};

namespace detail {

inline std::vector<i64> or_default(const std::vector<i64>& v, std::vector<i64> fallback) { return v.empty() ? fallback : v; }

inline std::vector<i64> range(i64 lo, i64 hi) {
  std::vector<i64> v;
  for (i64 x = lo; x <= hi; ++x) v.push_back(x);
  return v;
}

inline std::vector<i64> primes_upto(i64 lo, i64 hi) {
  std::vector<i64> v;
  for (i64 x = lo; x <= hi; ++x) {
    if (is_prime(x)) v.push_back(x);
  }
  return v;
}

inline Outcome cmd_kloosterman(const RunConfig& c) {
  const double tol = c.tol.value_or(1e-9);
  const auto moduli = or_default(c.q, range(1, 30));
  Outcome out;
  out.table.set_header("q,a,b,value,split_value,abs_diff");
  auto blocks = parallel_map(moduli.size(), c.jobs, [&](std::size_t i) {
    const i64 q = moduli[i];
    const KloosterTable table(q);
    std::vector<std::string> lines;
    long bad = 0;
    for (i64 b = 0; b < q; ++b) {
      const ComplexVal v = table[b];
      const ComplexVal s = kloosterman_split(1, b, q);
      const double diff = std::abs(v - s);
      if (diff > tol * static_cast<double>(q)) ++bad;
      lines.push_back(csv::join({csv::num(q), "1", csv::num(b), csv::num(v.real()), csv::num(s.real()), csv::num(diff)}));
    }
    return std::make_pair(lines, bad);
  });
  for (auto& [lines, bad] : blocks) {
    for (const auto& l : lines) out.table.add(l);
    out.failures += bad;
  }
  if (out.failures) out.messages.push_back(std::to_string(out.failures) + " values disagree between table and CRT split");
  return out;
}

inline Outcome cmd_hyperkl3(const RunConfig& c) {
  const double tol = c.tol.value_or(1e-9);
  const auto moduli = or_default(c.q, range(1, 30));
  Outcome out;
  out.table.set_header("q,m,re,im,abs,path_diff");
  auto blocks = parallel_map(moduli.size(), c.jobs, [&](std::size_t i) {
    const i64 q = moduli[i];
    const KloosterTable kt(q);
    const HyperKl3Table table(kt);
    std::vector<std::string> lines;
    long bad = 0;
    for (i64 m = 0; m < q; ++m) {
      const ComplexVal v = table[m];
      const double diff = std::abs(v - hyper_kl3_fast(m, kt));
      if (diff > tol * static_cast<double>(q)) ++bad;
      lines.push_back(csv::join({csv::num(q), csv::num(m), csv::num(v.real()), csv::num(v.imag()), csv::num(std::abs(v)), csv::num(diff)}));
    }
    return std::make_pair(lines, bad);
  });
  for (auto& [lines, bad] : blocks) {
    for (const auto& l : lines) out.table.add(l);
    out.failures += bad;
  }
  if (out.failures) out.messages.push_back(std::to_string(out.failures) + " values disagree between the two paths");
  return out;
}

inline Outcome cmd_charsum_pp(const RunConfig& c) {
  PPowerScanSpec spec;
  if (!c.p.empty()) spec.primes = c.p;
  spec.gamma_max = c.gamma_max;
  spec.u_max = c.u_max;
  spec.samples = c.samples.value_or(200);
  spec.seed = c.seed;
  const double tol = c.tol.value_or(1e-6);
  Outcome out;
  out.table.set_header(ppower_csv_header());
  for (const auto& r : ppower_scan(spec, c.jobs)) {
    out.table.add(to_csv(r));
    const auto& rep = r.result.report;
    if (r.result.regime == 'B' && rep.vanishing_predicted &&
        std::abs(rep.sum_value) > tol * std::pow(static_cast<double>(r.params.pp.p), 2 * r.params.u)) {
      ++out.failures;
    }
  }
  if (out.failures) out.messages.push_back(std::to_string(out.failures) + " tuples predicted to vanish did not");
  return out;
}

inline Outcome cmd_charsum_prime(const RunConfig& c) {
  const auto primes = or_default(c.p, primes_upto(3, 31));
  const double tol = c.tol.value_or(1e-6);
  Outcome out;
  out.table.set_header(prime_csv_header());
  for (const auto& r : prime_scan(primes, c.samples.value_or(50), c.seed, c.jobs)) {
    out.table.add(to_csv(r));
    if (r.report.alt_residual() > tol * static_cast<double>(r.p * r.p)) ++out.failures;
  }
  if (out.failures) out.messages.push_back(std::to_string(out.failures) + " tuples where the reduced sum differs");
  return out;
}

inline Outcome cmd_df(const RunConfig& c) {
  const auto primes = or_default(c.p, {3, 5, 7});
  std::vector<PrimePower> moduli;
  for (i64 p : primes) {
    for (int g = 1; g <= c.gamma_max; ++g) {
      const PrimePower pp = make_prime_power(p, g);
      if (pp.q > Caps::kPrimePowerModulus) break;
      moduli.push_back(pp);
    }
  }
  Outcome out;
  out.table.set_header(df_csv_header());
  for (const auto& r : df_scan(moduli, c.samples.value_or(100), c.seed, c.jobs)) out.table.add(to_csv(r));
  return out;
}

inline Outcome cmd_calc(const RunConfig& c) {
  const double tol = c.tol.value_or(1e-6);
  Outcome out;
  out.table.set_header(calc_csv_header());
  for (const auto& r : calc_scan(or_default(c.q, range(2, 60)), c.samples.value_or(4), c.seed, c.jobs)) {
    out.table.add(to_csv(r));
    if (r.report.alt_residual() > tol * static_cast<double>(r.q) * static_cast<double>(r.q)) ++out.failures;
  }
  if (out.failures) out.messages.push_back(std::to_string(out.failures) + " tuples where the CRT product differs");
  return out;
}

inline Outcome cmd_glue(const RunConfig& c) {
  const double tol = c.tol.value_or(1e-6);
  Outcome out;
  out.table.set_header(glue_csv_header());
  for (const auto& r : glue_scan(or_default(c.q, range(2, 60)), c.samples.value_or(2), c.seed, c.jobs)) {
    out.table.add(to_csv(r));
    if (r.report.alt_residual() > tol * static_cast<double>(r.g.q) * static_cast<double>(r.g.q)) ++out.failures;
  }
  if (out.failures) out.messages.push_back(std::to_string(out.failures) + " tuples where the CRT product differs");
  return out;
}

inline Outcome cmd_voronoi(const RunConfig& c) {
  const double tol = c.tol.value_or(1e-6);
  const auto moduli = or_default(c.q, range(1, 10));
  const auto scales = or_default(c.X, {50, 100});
  std::vector<std::pair<i64, i64>> cells;
  for (i64 X : scales) {
    for (i64 q : moduli) cells.emplace_back(q, X);
  }
  auto blocks = parallel_map(cells.size(), c.jobs, [&](std::size_t i) {
    VoronoiKernelCache cache;
    const auto [q, X] = cells[i];
    const SmoothWeight h(static_cast<double>(X));
    std::vector<VoronoiReport> reps;
    for (i64 a = 1; a <= q; ++a) {
      if (std::gcd(a, q) == 1) reps.push_back(voronoi_residual(a, q, h, std::nullopt, cache));
    }
    return reps;
  });
  Outcome out;
  out.table.set_header("a,q,X,lhs_re,lhs_im,main,dual_re,dual_im,N_max,residual,relative_residual,pass");
  for (const auto& reps : blocks) {
    for (const auto& r : reps) {
      const bool ok = r.passes(tol);
      out.failures += ok ? 0 : 1;
      out.table.add(csv::join({csv::num(r.a), csv::num(r.q), csv::num(r.X), csv::num(r.lhs.real()), csv::num(r.lhs.imag()),
                               csv::num(r.rhs_main.real()), csv::num(r.rhs_dual.real()), csv::num(r.rhs_dual.imag()),
                               csv::num(r.N_max), csv::num(r.residual), csv::num(r.relative_residual()), csv::flag(ok)}));
    }
  }
  if (out.failures) out.messages.push_back(std::to_string(out.failures) + " Voronoi residuals above tolerance");
  return out;
}

inline Outcome cmd_bilinear(const RunConfig& c) {
  const double tol = c.tol.value_or(1e-9);
  std::vector<BilinearConfig> configs;
  if (c.q.empty() && c.M.empty() && c.N.empty()) {
    configs = bilinear_grid(bilinear_grid_moduli(c.quick), c.seed);
  } else {
    for (i64 q : or_default(c.q, {7, 27, 101})) {
      ScanRng rng(mix_seed(c.seed, {14, q}));
      const i64 b = q == 1 ? 1 : rng.unit(q);
      for (i64 M : or_default(c.M, {q})) {
        for (i64 N : or_default(c.N, {1, 4})) {
          BilinearConfig cfg;
          cfg.q = q;
          cfg.b = b;
          cfg.M = M;
          cfg.N = N;
          configs.push_back(cfg);
        }
      }
    }
  }
  Outcome out;
  out.table.set_header(bilinear_csv_header());
  for (const auto& r : bilinear_scan(configs, c.jobs)) {
    out.table.add(to_csv(r));
    const auto& rep = r.report;
    if (rep.path_residual() > tol * std::max(std::abs(rep.sum_value), 1e-300) || !rep.within_trivial()) ++out.failures;
  }
  if (out.failures) out.messages.push_back(std::to_string(out.failures) + " configurations failed the path or trivial-bound check");
  return out;
}

inline Outcome cmd_distribution(const RunConfig& c) {
  const double tol = c.tol.value_or(1e-6);
  const i64 X = c.X.empty() ? 100'000 : c.X.front();
  const auto moduli = or_default(c.q, range(1, 30));
  const DivisorTable d3t = divisor_table(3, X);
  auto blocks = parallel_map(moduli.size(), c.jobs, [&](std::size_t i) {
    const i64 q = moduli[i];
    const auto sums = d3_class_sums(d3t, X, q);
    double worst = 0.0;
    for (i64 a = 1; a <= q; ++a) {
      if (std::gcd(a, q) == 1) worst = std::max(worst, ramanujan_decomposition(sums, X, q, a).residual());
    }
    return worst;
  });
  const DiscrepancyScan scan = discrepancy_scan(d3t, X, moduli);
  Outcome out;
  out.table.set_header("X,q,a,ap_sum,coprime_mean,delta,max_abs_delta,normalized,zero_sum,decomposition_residual,slope_fit");
  std::size_t row = 0;
  for (std::size_t k = 0; k < moduli.size(); ++k) {
    const auto& s = scan.summaries[k];
    for (; row < scan.rows.size() && scan.rows[row].q == s.q; ++row) {
      const auto& r = scan.rows[row];
      out.table.add(csv::join({csv::num(X), csv::num(r.q), csv::num(r.a), to_string(r.ap_sum), to_string(r.coprime_mean),
                               csv::num(r.delta), "", "", "", "", ""}));
    }
    const bool ok = s.zero_sum && blocks[k] <= tol;
    out.failures += ok ? 0 : 1;
    out.table.add(csv::join({csv::num(X), csv::num(s.q), "*", "", "", "", csv::num(s.max_abs_delta), csv::num(s.normalized),
                             csv::flag(s.zero_sum), csv::num(blocks[k]), ""}));
  }
  out.table.add(csv::join({csv::num(X), "*", "*", "", "", "", "", "", "", "", csv::num(scan.fit.slope)}));
  if (out.failures) out.messages.push_back(std::to_string(out.failures) + " moduli failed the zero-sum or decomposition check");
  return out;
}

inline Outcome cmd_verify_all(const RunConfig& c) {
  const VerifyOptions opt{c.quick, c.jobs, c.seed};
  Outcome out;
  out.table.header = {"status", "check", "detail"};
  for (const auto& check : all_checks()) {
    const CheckResult r = check(opt);
    out.failures += r.pass ? 0 : 1;
    out.table.rows.push_back({r.pass ? "PASS" : "FAIL", r.id, r.detail});
  }
  return out;
}

inline void write_verify(const Table& t, std::ostream& os, const std::string& format) {
  if (format == "json") {
    t.write(os, format);
    return;
  }
  for (const auto& r : t.rows) os << r[0] << ' ' << r[1] << ": " << r[2] << '\n';
}

}  // namespace detail

/// Runs a validated configuration and writes its table to `os` (or to c.out).
inline int execute(const RunConfig& c, std::ostream& os, std::ostream& err) {
  validate(c);
  using Cmd = Outcome (*)(const RunConfig&);
  static const std::map<std::string, Cmd> table{
      {"kloosterman", detail::cmd_kloosterman}, {"hyperkl3", detail::cmd_hyperkl3},
      {"charsum-pp", detail::cmd_charsum_pp},   {"charsum-prime", detail::cmd_charsum_prime},
      {"df", detail::cmd_df},                   {"calC", detail::cmd_calc},
      {"glue", detail::cmd_glue},               {"voronoi", detail::cmd_voronoi},
      {"bilinear", detail::cmd_bilinear},       {"distribution", detail::cmd_distribution},
      {"verify-all", detail::cmd_verify_all}};
  const Outcome result = table.at(c.subcommand)(c);
  std::ofstream file;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) throw ValidationError("cannot write '" + c.out + "'");
  }
  std::ostream& dest = c.out.empty() ? os : file;
  if (c.subcommand == "verify-all") {
    detail::write_verify(result.table, dest, c.format);
  } else {
    result.table.write(dest, c.format);
  }
  for (const auto& m : result.messages) err << m << '\n';
  return result.failures == 0 ? 0 : 1;
}

inline int run(int argc, const char* const* argv, std::ostream& os = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Exponential sums, correlation sums and d_3 in progressions: scans and checks"};
  std::string command, config_path, p, q, X, M, N, out, format;
  int gamma_max = 0, u_max = -1, jobs = 0, samples = 0;
  double tol = 0.0;
  bool quick = false;
  std::uint64_t seed = 0;
  app.add_option("command", command, "subcommand")->required();
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_option("--p", p, "primes, e.g. 3,5 or 3..31");
  app.add_option("--gamma-max", gamma_max, "largest exponent gamma");
  app.add_option("--u-max", u_max, "largest u (0 means every u with 5u <= 4 gamma)");
  app.add_option("--q", q, "moduli, e.g. 1..20,30");
  app.add_option("--X", X, "scales X");
  app.add_option("--M", M, "M values");
  app.add_option("--N", N, "N values");
  app.add_option("--out", out, "output file (default stdout)");
  app.add_option("--format", format, "csv or json");
  app.add_option("--jobs", jobs, "worker threads (default EXPSUM_JOBS or 1)");
  app.add_option("--tol", tol, "tolerance override");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--samples", samples, "samples per cell");
  app.add_flag("--quick", quick, "reduced verify-all suite");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    os << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  try {
    RunConfig c;
    if (!config_path.empty()) {
      c = load_config(config_path);
    } else {
      c.jobs = default_jobs();
    }
    c.subcommand = command;
    if (app.count("--p")) c.p = parse_range_list(p);
    if (app.count("--q")) c.q = parse_range_list(q);
    if (app.count("--X")) c.X = parse_range_list(X);
    if (app.count("--M")) c.M = parse_range_list(M);
    if (app.count("--N")) c.N = parse_range_list(N);
    if (app.count("--gamma-max")) c.gamma_max = gamma_max;
    if (app.count("--u-max")) c.u_max = u_max;
    if (app.count("--out")) c.out = out;
    if (app.count("--format")) c.format = format;
    if (app.count("--jobs")) c.jobs = jobs;
    if (app.count("--tol")) c.tol = tol;
    if (app.count("--seed")) c.seed = seed;
    if (app.count("--samples")) c.samples = samples;
    if (quick) c.quick = true;
    return execute(c, os, err);
  } catch (const ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace expsum::cli
