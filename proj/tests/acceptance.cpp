// Acceptance run: one PASS/FAIL line per criterion.
//
// Criteria 1-11 are the lines of a full `verify-all` run made through the
// command-line entry point. Criterion 12 repeats that run and compares the two
// outputs byte for byte, then compares the bilinear scan for jobs 1 and 2.
// With --csv PATH the bilinear cancellation table is also written to PATH.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <expsum/cli.hpp>

namespace {

struct RunOutput {
  int code = 0;
  std::string out;
  double seconds = 0.0;
};

RunOutput run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"expsum"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  const int code = expsum::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << err.str();
  return {code, out.str(), s};
}

}  // namespace

int main(int argc, char** argv) {
  std::string csv_path;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--csv") csv_path = argv[i + 1];
  }

  const std::vector<std::string> ids{"explicit_kloosterman",      "sigma00_identity", "crt_and_hyper_kloosterman",
                                     "weil_deligne_audit",        "c_gamma_u_sums",  "c_1_1_moebius",
                                     "dabrowski_fisher",          "calC_and_glue",    "voronoi_divisor",
                                     "distribution_identities",   "bilinear_paths"};

  const RunOutput first = run_cli({"verify-all", "--jobs", "1"});
  std::vector<std::string> lines;
  {
    std::istringstream in(first.out);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
  }

  int failures = 0;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    std::string line;
    for (const auto& l : lines) {
      const auto colon = l.find(':');
      const auto space = l.find(' ');
      if (space != std::string::npos && colon != std::string::npos && l.substr(space + 1, colon - space - 1) == ids[k]) line = l;
    }
    const bool pass = line.rfind("PASS ", 0) == 0;
    failures += pass ? 0 : 1;
    std::cout << "criterion " << (k + 1) << ' ' << (line.empty() ? "FAIL " + ids[k] + ": missing from verify-all output" : line)
              << '\n';
  }
  std::cout.flush();

  const RunOutput second = run_cli({"verify-all", "--jobs", "1"});
  const RunOutput scan1 = run_cli({"bilinear", "--jobs", "1"});
  const RunOutput scan2 = run_cli({"bilinear", "--jobs", "2"});
  const bool same = first.out == second.out;
  const bool same_jobs = scan1.out == scan2.out;
  const bool exit_ok = first.code == 0 && second.code == 0;
  const bool pass12 = same && same_jobs && exit_ok;
  failures += pass12 ? 0 : 1;
  char timing[96];
  std::snprintf(timing, sizeof timing, "%.1fs and %.1fs", first.seconds, second.seconds);
  std::cout << "criterion 12 " << (pass12 ? "PASS" : "FAIL") << " determinism: verify-all twice "
            << (same ? "byte-identical" : "DIFFERENT") << " (" << first.out.size() << " bytes, " << timing << "), exit codes "
            << first.code << "/" << second.code << ", bilinear scan jobs 1 vs 2 " << (same_jobs ? "identical" : "DIFFERENT") << '\n';

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    csv << scan1.out;
    std::cout << "cancellation CSV written to " << csv_path << '\n';
  }
  return failures == 0 ? 0 : 1;
}
