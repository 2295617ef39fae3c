#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <expsum/cli.hpp>

using namespace expsum;

namespace {

struct Captured {
  int code = 0;
  std::string out, err;
};

Captured invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "expsum");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("expsum_cli_" + name);
  std::ofstream(path) << body;
  return path.string();
}

}  // namespace

TEST(RangeList, Parses) {
  EXPECT_EQ(cli::parse_range_list("1..4,30"), (std::vector<i64>{1, 2, 3, 4, 30}));
  EXPECT_EQ(cli::parse_range_list("7"), (std::vector<i64>{7}));
  EXPECT_THROW(cli::parse_range_list("5..2"), Error);
  EXPECT_THROW(cli::parse_range_list("a,b"), Error);
  EXPECT_THROW(cli::parse_range_list(""), Error);
}

TEST(Config, MinimalFileGivesDefaults) {
  const auto c = cli::load_config(temp_file("min.json", "{}"));
  EXPECT_EQ(c.subcommand, "verify-all");
  EXPECT_EQ(c.gamma_max, 6);
  EXPECT_EQ(c.format, "csv");
  EXPECT_EQ(c.jobs, 1);
  EXPECT_FALSE(c.tol.has_value());
}

TEST(Config, ReadsKeys) {
  const auto c = cli::load_config(temp_file("keys.json", R"({"subcommand":"charsum-pp","p":[3,5],"gamma_max":4,"q":"1..3","seed":9})"));
  EXPECT_EQ(c.subcommand, "charsum-pp");
  EXPECT_EQ(c.p, (std::vector<i64>{3, 5}));
  EXPECT_EQ(c.q, (std::vector<i64>{1, 2, 3}));
  EXPECT_EQ(c.gamma_max, 4);
  EXPECT_EQ(c.seed, 9u);
}

TEST(Config, Rejections) {
  EXPECT_THROW(cli::load_config(temp_file("unknown.json", R"({"gama_max":3})")), ValidationError);
  EXPECT_THROW(cli::load_config(temp_file("cap.json", R"({"subcommand":"charsum-pp","gamma_max":40})")), ValidationError);
  EXPECT_THROW(cli::load_config(temp_file("bad.json", R"({"p": [3,)")), ParseError);
  EXPECT_THROW(cli::load_config(temp_file("tol.json", R"({"tol":1e-300})")), ValidationError);
  EXPECT_THROW(cli::load_config(temp_file("prime.json", R"({"subcommand":"df","p":[9]})")), ValidationError);
  EXPECT_THROW(cli::load_config("/nonexistent/expsum.json"), ParseError);
}

TEST(Run, ExitCodes) {
  EXPECT_EQ(invoke({"nosuch"}).code, 2);
  EXPECT_EQ(invoke({"kloosterman", "--q", "0..3"}).code, 2);
  EXPECT_EQ(invoke({"voronoi", "--q", "51"}).code, 2);
  EXPECT_EQ(invoke({"kloosterman", "--bogus"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({"kloosterman", "--q", "1..12"}).code, 0);
}

TEST(Run, VerifyQuickPassesAndIsDeterministic) {
  const auto a = invoke({"verify-all", "--quick", "--jobs", "1"});
  const auto b = invoke({"verify-all", "--quick", "--jobs", "1"});
  const auto c = invoke({"verify-all", "--quick", "--jobs", "2"});
  EXPECT_EQ(a.code, 0) << a.out << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  std::istringstream lines(a.out);
  int count = 0;
  for (std::string l; std::getline(lines, l); ++count) EXPECT_EQ(l.rfind("PASS ", 0), 0u) << l;
  EXPECT_EQ(count, 11);
}

TEST(Run, ScansAreIndependentOfJobs) {
  for (const std::string cmd : {"charsum-pp", "charsum-prime", "bilinear"}) {
    std::vector<std::string> base{cmd, "--seed", "4"};
    if (cmd == "charsum-pp") base.insert(base.end(), {"--p", "3", "--gamma-max", "4", "--samples", "10"});
    if (cmd == "charsum-prime") base.insert(base.end(), {"--p", "3,5,7,11,13", "--samples", "5"});
    auto one = base, two = base;
    one.insert(one.end(), {"--jobs", "1"});
    two.insert(two.end(), {"--jobs", "2"});
    const auto r1 = invoke(one), r2 = invoke(two);
    EXPECT_EQ(r1.code, 0) << cmd << r1.err;
    EXPECT_EQ(r1.out, r2.out) << cmd;
  }
}

TEST(Run, CsvHeaderAndJson) {
  const auto r = invoke({"charsum-pp", "--p", "3", "--gamma-max", "2", "--samples", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), ppower_csv_header());
  const auto j = invoke({"kloosterman", "--q", "1..5", "--format", "json"});
  ASSERT_EQ(j.code, 0) << j.err;
  const auto parsed = nlohmann::json::parse(j.out);
  ASSERT_TRUE(parsed.is_array());
  EXPECT_FALSE(parsed.empty());
  EXPECT_TRUE(parsed[0].is_object());
}

TEST(Run, WritesOutFile) {
  const auto path = (std::filesystem::temp_directory_path() / "expsum_cli_out.csv").string();
  std::filesystem::remove(path);
  const auto r = invoke({"bilinear", "--q", "7", "--M", "20", "--N", "2", "--out", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, bilinear_csv_header());
}

TEST(Run, ConfigFileWithOverride) {
  const auto path = temp_file("run.json", R"({"subcommand":"kloosterman","q":"1..4"})");
  const auto r = invoke({"kloosterman", "--config", path, "--q", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find('\n'), std::string::npos);
}
