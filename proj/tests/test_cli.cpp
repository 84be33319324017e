#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "lexwalk/cli.hpp"
#include "lexwalk/io.hpp"
#include "scratch_dir.hpp"

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "lexwalk");
  std::ostringstream out, err;
  const int code = lexwalk::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Data rows of an artifact CSV, split into cells; comment lines and the header dropped.
std::vector<std::vector<std::string>> csv_rows(const std::filesystem::path &file) {
  std::istringstream in(lexwalk::io::read_file(file));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    rows.push_back(lexwalk::io::split_csv_line(line));
  }
  return rows;
}

std::string header_value(const std::filesystem::path &file, const std::string &key) {
  std::istringstream in(lexwalk::io::read_file(file));
  std::string line;
  while (std::getline(in, line) && line.starts_with("#")) {
    if (line.starts_with("# " + key + "=")) return line.substr(key.size() + 3);
  }
  return {};
}

}  // namespace

TEST(Cli, GeneratedProfileReproducesTotals) {
  ScratchDir dir;
  const auto r = run({"profile", "--words", "93000", "--meanings", "138000", "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  double words = 0.0, meanings = 0.0;
  for (const auto &row : csv_rows(dir / "profile.csv")) {
    words += std::stod(row[1]);
    meanings += std::stod(row[0]) * std::stod(row[1]);
  }
  EXPECT_NEAR(words, 93000.0, 1e-9 * 93000.0);
  EXPECT_NEAR(meanings, 138000.0, 1e-9 * 138000.0);
  EXPECT_EQ(header_value(dir / "profile.csv", "tool"), "lexwalk 0.1.0");
}

TEST(Cli, LifetimeFromProfileFileIsGeometric) {
  ScratchDir dir;
  {
    std::ofstream p(dir / "p.csv");
    p << "level,occupancy\n1,4\n";
  }
  const auto r = run({"lifetime", "--profile-file", (dir / "p.csv").string(), "--horizon", "50", "--out",
                      dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(dir / "lifetime.csv");
  ASSERT_EQ(rows.size(), 50u);
  for (const auto &row : rows) {
    const int t = std::stoi(row[0]);
    EXPECT_NEAR(std::stod(row[1]), 0.25 * std::pow(0.75, t - 1), 1e-15);
    EXPECT_NEAR(std::stod(row[2]), std::pow(0.75, t), 1e-14);
  }
}

TEST(Cli, CompareWithoutCalibrationFails) {
  ScratchDir dir;
  const auto r = run({"compare", "--no-calibration", "--occupancies", "3,2", "--out", dir.path().string()});
  EXPECT_NE(r.code, 0);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j.at("error"), "CalibrationMissing");
  EXPECT_TRUE(j.contains("message"));
  EXPECT_FALSE(std::filesystem::exists(dir / "comparison.csv"));
}

TEST(Cli, ModuleErrorsAreJson) {
  ScratchDir dir;
  const auto r = run({"qsd", "--occupancies", "3,1", "--out", dir.path().string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(nlohmann::json::parse(r.err).at("error"), "OccupancyBelowTwo");
}

TEST(Cli, UnknownFlagsAndSubcommandsRejected) {
  EXPECT_EQ(run({"profile", "--bogus", "1"}).code, 64);
  EXPECT_EQ(run({"teleport"}).code, 64);
  EXPECT_EQ(run({"lifetime", "--top", "sideways", "--occupancies", "4"}).code, 2);
  EXPECT_EQ(nlohmann::json::parse(run({"profile", "--bogus"}).err).at("error"), "UsageError");
}

TEST(Cli, SeedFlagOverridesConfigSeed) {
  ScratchDir dir;
  {
    std::ofstream c(dir / "run.json");
    c << R"({"occupancies": [6, 3, 2], "seed": 11})";
  }
  const auto cfg = (dir / "run.json").string();
  const auto a = dir / "a";
  const auto b = dir / "b";
  const auto c = dir / "c";
  ASSERT_EQ(run({"simulate", "trajectory", "--config", cfg, "--count", "5", "--out", a.string()}).code, 0);
  ASSERT_EQ(run({"simulate", "trajectory", "--config", cfg, "--count", "5", "--seed", "11", "--out", b.string()}).code,
            0);
  ASSERT_EQ(run({"simulate", "trajectory", "--config", cfg, "--count", "5", "--seed", "12", "--out", c.string()}).code,
            0);
  EXPECT_EQ(header_value(a / "trajectory_0.csv", "seed"), "11");
  EXPECT_EQ(header_value(c / "trajectory_0.csv", "seed"), "12");
  for (int i = 0; i < 5; ++i) {
    const auto name = "trajectory_" + std::to_string(i) + ".csv";
    EXPECT_EQ(lexwalk::io::read_file(a / name), lexwalk::io::read_file(b / name));
  }
  const auto ja = nlohmann::json::parse(lexwalk::io::read_file(a / "trajectories.json"));
  const auto jc = nlohmann::json::parse(lexwalk::io::read_file(c / "trajectories.json"));
  EXPECT_NE(ja.at("trajectories")[0].at("seed"), jc.at("trajectories")[0].at("seed"));
}

TEST(Cli, RerunsAreByteIdentical) {
  ScratchDir dir;
  const std::vector<std::vector<std::string>> commands = {
      {"profile", "--occupancies", "20,8,3"},
      {"lifetime", "--occupancies", "20,8,3"},
      {"age-dist", "--occupancies", "20,8,3"},
      {"polysemy-age", "--occupancies", "20,8,3", "--points", "20"},
      {"qsd", "--occupancies", "20,8,3"},
      {"age-given-level", "--occupancies", "20,8,3", "--level", "2"},
      {"fit", "--occupancies", "20,8,3"},
      {"compare", "--occupancies", "20,8,3", "--calibrate", "--warp", "factor=3,break=1700,ref=2000"},
      {"simulate", "trajectory", "--occupancies", "20,8,3", "--count", "3", "--seed", "9"},
      {"simulate", "population", "--occupancies", "20,8,3", "--ticks", "300", "--seed", "9"},
      {"simulate", "revival", "--occupancies", "20,8,3", "--bottom", "revive:5", "--count", "50", "--horizon", "500"},
  };
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const auto first = dir / ("run" + std::to_string(i) + "a");
    const auto second = dir / ("run" + std::to_string(i) + "b");
    auto a = commands[i];
    auto b = commands[i];
    a.insert(a.end(), {"--out", first.string()});
    b.insert(b.end(), {"--out", second.string()});
    const auto ra = run(a);
    const auto rb = run(b);
    ASSERT_EQ(ra.code, 0) << commands[i][0] << ": " << ra.err;
    ASSERT_EQ(rb.code, 0) << rb.err;
    EXPECT_EQ(ra.out, rb.out);
    std::size_t files = 0;
    for (const auto &entry : std::filesystem::directory_iterator(first)) {
      const auto name = entry.path().filename();
      ASSERT_TRUE(std::filesystem::exists(second / name)) << name;
      EXPECT_EQ(lexwalk::io::read_file(entry.path()), lexwalk::io::read_file(second / name)) << name;
      const auto text = lexwalk::io::read_file(entry.path());
      if (name.extension() == ".csv") EXPECT_TRUE(text.starts_with("# tool=lexwalk 0.1.0\n# config_hash="));
      if (name.extension() == ".json") EXPECT_TRUE(nlohmann::json::parse(text).contains("_meta"));
      ++files;
    }
    EXPECT_GT(files, 0u) << commands[i][0];
  }
}

TEST(Cli, OutputColumnsMatchDocumentedHeaders) {
  ScratchDir dir;
  const auto out = dir.path().string();
  ASSERT_EQ(run({"qsd", "--occupancies", "5,2", "--out", out}).code, 0);
  ASSERT_EQ(run({"simulate", "population", "--occupancies", "5,2", "--ticks", "5", "--out", out}).code, 0);
  ASSERT_EQ(run({"compare", "--occupancies", "5,2", "--calibrate", "--out", out}).code, 0);
  ASSERT_EQ(run({"fit", "--occupancies", "5,2", "--out", out}).code, 0);
  const auto first_data_line = [](const std::filesystem::path &f) {
    std::istringstream in(lexwalk::io::read_file(f));
    std::string line;
    while (std::getline(in, line) && line.starts_with("#")) {
    }
    return line;
  };
  EXPECT_EQ(first_data_line(dir / "qsd.csv"), "level,probability");
  EXPECT_EQ(first_data_line(dir / "census.csv"), "tick,level,count");
  EXPECT_EQ(first_data_line(dir / "comparison.csv"), "age_years,model_density,empirical_density,ratio");
  const auto fit = nlohmann::json::parse(lexwalk::io::read_file(dir / "fit.json"));
  for (const char *key : {"w1", "q1", "w2", "q2", "residual"}) EXPECT_TRUE(fit.contains(key)) << key;
}
