#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mfa/csv.hpp"
#include "mfa/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(MFA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mfa_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_values(const fs::path& path, const std::vector<double>& v) {
  std::ofstream out(path);
  mfa::write_series_csv(out, mfa::TimeSeries::from_values(v));
}

}  // namespace

TEST(Cli, SynthThenMfdfaRecoversHurst) {
  const auto dir = scratch("synth");
  ASSERT_EQ(run("synth --model fgn --hurst 0.7 --n 10000 --seed 1 --out " + dir.string()), 0);
  ASSERT_TRUE(fs::exists(dir / "series.csv"));
  ASSERT_EQ(run("mfdfa --input " + (dir / "series.csv").string() + " --out " +
                (dir / "mf").string()),
            0);
  const auto j = json::parse(slurp(dir / "mf" / "spectrum.json"));
  const double h = j["spectrum"]["hurst"];
  EXPECT_GE(h, 0.65);
  EXPECT_LE(h, 0.75);
  EXPECT_TRUE(fs::exists(dir / "mf" / "spectrum.csv"));
  EXPECT_TRUE(fs::exists(dir / "mf" / "surface.csv"));
}

TEST(Cli, RhoOfSeriesWithItselfIsOne) {
  const auto dir = scratch("rho");
  write_values(dir / "x.csv", mfa::synth::fgn(2000, 0.5, 3));
  const auto x = (dir / "x.csv").string();
  ASSERT_EQ(run("rho --x " + x + " --y " + x + " --sims 100 --out " + dir.string()), 0);
  std::istringstream in(slurp(dir / "rho.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("scale,rho,", 0), 0u);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::stod(mfa::split_csv_line(line, ',')[1]), 1.0);
    ++rows;
  }
  EXPECT_GT(rows, 3u);
}

TEST(Cli, TestsOnRampFindTrend) {
  const auto dir = scratch("tests");
  std::vector<double> ramp(500);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 0.5 + 0.001 * double(i);
  write_values(dir / "ramp.csv", ramp);
  ASSERT_EQ(run("tests --input " + (dir / "ramp.csv").string() + " --out " + dir.string()), 0);
  const auto j = json::parse(slurp(dir / "tests.json"));
  EXPECT_LT(j["tests"]["mann_kendall"]["p_value"].get<double>(), 1e-6);
}

TEST(Cli, SurrogateEnsembleKeepsValues) {
  const auto dir = scratch("surrogate");
  write_values(dir / "x.csv", mfa::synth::fgn(256, 0.6, 4));
  ASSERT_EQ(run("surrogate --input " + (dir / "x.csv").string() +
                " --method iaaft --ensemble 3 --seed 5 --out " + dir.string()),
            0);
  std::istringstream in(slurp(dir / "ensemble.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "timestamp,member_0,member_1,member_2");
  EXPECT_TRUE(fs::exists(dir / "ensemble.json"));
}

TEST(Cli, CoupledSynthWritesBothSides) {
  const auto dir = scratch("coupled");
  ASSERT_EQ(run("synth --model coupled --n 300 --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "x.csv"));
  EXPECT_TRUE(fs::exists(dir / "y.csv"));
  ASSERT_EQ(run("mfdcca --x " + (dir / "x.csv").string() + " --y " + (dir / "y.csv").string() +
                " --out " + (dir / "joint").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "joint" / "spectrum.json"));
}

TEST(Cli, UsageErrors) {
  const auto dir = scratch("usage");
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("mfdfa --input /nonexistent.csv --out " + dir.string()), 2);
  EXPECT_EQ(run("synth --model fgn --bogus 1 --out " + dir.string()), 2);
  EXPECT_EQ(run("synth --model fgn --hurst 1.5 --out " + dir.string()), 2);
  write_values(dir / "x.csv", mfa::synth::fgn(500, 0.5, 1));
  EXPECT_EQ(run("mfdfa --input " + (dir / "x.csv").string() + " --order 7 --out " + dir.string()),
            2);
  EXPECT_EQ(run("mfdfa --input " + (dir / "x.csv").string() + " --q-step 0 --out " +
                dir.string()),
            2);
}

TEST(Cli, AnalyzeEndToEnd) {
  const auto dir = scratch("analyze");
  write_values(dir / "a.csv", mfa::synth::fgn(600, 0.4, 1));
  write_values(dir / "b.csv", mfa::synth::fgn(600, 0.6, 2));
  const json cfg = {
      {"inputs",
       {{{"path", "a.csv"}, {"label", "A"}, {"kind", "generic"}},
        {{"path", "b.csv"}, {"label", "B"}, {"kind", "generic"}}}},
      {"periods", {{{"label", "all"}, {"start", 0}, {"end", 599}}}},
      {"pairs", json::array({json::array({"A", "B"})})},
      {"attribution", false},
      {"rho_sims", 100},
      {"s_min", 20}};
  std::ofstream(dir / "config.json") << cfg.dump(2);
  ASSERT_EQ(run("analyze --config " + (dir / "config.json").string() + " --out " +
                (dir / "out").string()),
            0);
  for (const char* f : {"report.json", "run_manifest.json", "table1_tests.csv",
                        "table2_mfdfa.csv", "table3_mfdcca.csv", "fig_rho/A-B.csv",
                        "fig_spectrum/A.csv"})
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  const auto report = json::parse(slurp(dir / "out" / "report.json"));
  EXPECT_FALSE(report["manifest"].contains("wall_clock_seconds"));
  const auto manifest = json::parse(slurp(dir / "out" / "run_manifest.json"));
  EXPECT_EQ(manifest["config_hash"], report["manifest"]["config_hash"]);
  EXPECT_TRUE(manifest.contains("wall_clock_seconds"));

  // A flag override lands in the echoed config and changes the hash.
  ASSERT_EQ(run("analyze --config " + (dir / "config.json").string() + " --seed 99 --out " +
                (dir / "out2").string()),
            0);
  const auto other = json::parse(slurp(dir / "out2" / "report.json"));
  EXPECT_EQ(other["manifest"]["config"]["seed"], 99);
  EXPECT_NE(other["manifest"]["config_hash"], report["manifest"]["config_hash"]);
}

TEST(Cli, AnalyzeExitCodes) {
  const auto dir = scratch("analyze_codes");
  std::vector<double> flat(600, 0.0);
  write_values(dir / "a.csv", mfa::synth::fgn(600, 0.4, 1));
  write_values(dir / "flat.csv", flat);
  json cfg = {{"inputs",
               {{{"path", "a.csv"}, {"label", "A"}, {"kind", "generic"}},
                {{"path", "flat.csv"}, {"label", "F"}, {"kind", "generic"}}}},
              {"periods", {{{"label", "all"}, {"start", 0}, {"end", 599}}}},
              {"attribution", false},
              {"s_min", 20}};
  std::ofstream(dir / "partial.json") << cfg.dump();
  EXPECT_EQ(run("analyze --config " + (dir / "partial.json").string() + " --out " +
                (dir / "o1").string()),
            1);
  EXPECT_TRUE(fs::exists(dir / "o1" / "report.json"));

  cfg["periods"] = json::array();
  std::ofstream(dir / "empty.json") << cfg.dump();
  EXPECT_EQ(run("analyze --config " + (dir / "empty.json").string() + " --out " +
                (dir / "o2").string()),
            2);
  EXPECT_FALSE(fs::exists(dir / "o2" / "report.json"));

  cfg["periods"] = {{{"label", "all"}, {"start", 0}, {"end", 599}}};
  cfg["bogus"] = 1;
  std::ofstream(dir / "unknown.json") << cfg.dump();
  EXPECT_EQ(run("analyze --config " + (dir / "unknown.json").string() + " --out " +
                (dir / "o3").string()),
            2);
}
