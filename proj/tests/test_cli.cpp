#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wnn/cli.hpp"

namespace fs = std::filesystem;
using namespace wnn;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "wnn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("wnn-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::vector<std::string> fields;
      std::stringstream ls(line);
      std::string f;
      while (std::getline(ls, f, ',')) fields.push_back(f);
      rows.push_back(fields);
    }
    return rows;
  }

  void write_segment(const fs::path& p, const std::vector<double>& values) const {
    std::ofstream out(p);
    for (double v : values) out << std::lround(v) << '\n';
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, FeaturizeSyntheticWritesOneRowPerSegment) {
  const auto r = run_cli({"featurize", "--synthetic", "--per-class", "10", "--seed", "3", "--svg", "--out",
                          path("feat").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(path("feat") / "features.csv");
  ASSERT_EQ(rows.size(), 30u);
  for (const auto& row : rows) {
    ASSERT_EQ(row.size(), 9u);
    double sum = 0;
    for (int k = 2; k < 8; ++k) sum += std::stod(row[static_cast<std::size_t>(k)]);
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  EXPECT_TRUE(fs::exists(path("feat") / "summary.csv"));
  EXPECT_TRUE(fs::exists(path("feat") / "energy.svg"));
}

TEST_F(CliTest, TrainIsReproducibleAndEvaluates) {
  const std::vector<std::string> base = {"train", "--synthetic", "--per-class", "20", "--seed", "4"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", path("a").string()});
  b.insert(b.end(), {"--out", path("b").string()});
  const auto ra = run_cli(a), rb = run_cli(b);
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(rb.code, 0) << rb.err;
  EXPECT_EQ(slurp(path("a") / "model.txt"), slurp(path("b") / "model.txt"));
  EXPECT_EQ(csv_rows(path("a") / "test.csv").size(), 10u);
  EXPECT_EQ(csv_rows(path("a") / "train.csv").size(), 50u);

  const auto manifest = nlohmann::json::parse(slurp(path("a") / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 4);
  EXPECT_EQ(manifest["layers"], nlohmann::json({6, 5, 1}));

  const auto e = run_cli({"evaluate", "--model", (path("a") / "model.txt").string(), "--features",
                          (path("a") / "test.csv").string(), "--out", path("eval").string()});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("Correct:"), std::string::npos) << e.out;
  EXPECT_TRUE(fs::exists(path("eval") / "report.csv"));
}

TEST_F(CliTest, ZeroEpochsStopsAtMaxEpochs) {
  const auto r = run_cli({"train", "--synthetic", "--per-class", "6", "--max-epochs", "0", "--out",
                          path("t").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto manifest = nlohmann::json::parse(slurp(path("t") / "manifest.json"));
  EXPECT_EQ(manifest["result"]["stop_reason"], "MaxEpochs");
  EXPECT_EQ(manifest["result"]["epochs_run"], 0);
}

TEST_F(CliTest, ConfigFileYieldsToFlags) {
  {
    std::ofstream cfg(path("run.cfg"));
    cfg << "# test config\nsynthetic = true\nper_class = 6\nseed = 5\nmax_epochs = 3\n";
  }
  const auto r = run_cli({"train", "--config", path("run.cfg").string(), "--seed", "6", "--out", path("t").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto manifest = nlohmann::json::parse(slurp(path("t") / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 6);
  EXPECT_EQ(manifest["train_config"]["max_epochs"], 3);
  {
    std::ofstream cfg(path("bad.cfg"));
    cfg << "synthetic = true\nwhat = 1\n";
  }
  EXPECT_EQ(run_cli({"train", "--config", path("bad.cfg").string(), "--out", path("u").string()}).code, 1);
}

TEST_F(CliTest, EvaluateOnEmptyFeatureFileIsDataError) {
  ASSERT_EQ(run_cli({"train", "--synthetic", "--per-class", "6", "--out", path("t").string()}).code, 0);
  {
    std::ofstream f(path("empty.csv"));
    f << "segment_id,set,D1,D2,D3,D4,D5,A5,label\n";
  }
  const auto r = run_cli({"evaluate", "--model", (path("t") / "model.txt").string(), "--features",
                          path("empty.csv").string(), "--out", path("e").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("CountMismatch"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("e") / "report.txt"));
}

TEST_F(CliTest, CorruptModelReportsLine) {
  {
    std::ofstream m(path("model.txt"));
    m << "wnn-model v1 layers=6,5,1 activation=tanh\nlayer 1 weights 1 2 3\n";
  }
  {
    std::ofstream f(path("f.csv"));
    f << "segment_id,set,D1,D2,D3,D4,D5,A5,label\nA/x,A,0.1,0.1,0.1,0.1,0.1,0.5,healthy\n";
  }
  const auto r = run_cli({"evaluate", "--model", path("model.txt").string(), "--features", path("f.csv").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("model.txt:2"), std::string::npos) << r.err;
}

TEST_F(CliTest, DecomposeConstantSegment) {
  write_segment(path("flat.txt"), std::vector<double>(4096, 25.0));
  const auto r = run_cli({"decompose", "--segment", path("flat.txt").string(), "--out", path("d").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(path("d") / "bands.csv");
  ASSERT_EQ(rows.size(), 6u);
  double share_sum = 0;
  for (std::size_t b = 0; b < 5; ++b) EXPECT_LT(std::stod(rows[b][5]), 1e-12) << rows[b][0];
  EXPECT_EQ(rows[5][0], "A5");
  EXPECT_NEAR(std::stod(rows[5][5]), 4096.0 * 625.0, 1e-6);
  for (const auto& row : rows) share_sum += std::stod(row[6]);
  EXPECT_NEAR(share_sum, 1.0, 1e-12);
  EXPECT_EQ(csv_rows(path("d") / "D1.csv").size(), 2048u);
  EXPECT_EQ(csv_rows(path("d") / "A5.csv").size(), 128u);
}

TEST_F(CliTest, DecomposeToneConcentratesInGamma) {
  std::vector<double> x(4097);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1000.0 * std::sin(2 * std::numbers::pi * 32.0 * i / 173.61);
  write_segment(path("tone.txt"), x);
  const auto r = run_cli({"decompose", "--segment", path("tone.txt").string(), "--out", path("d").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(path("d") / "bands.csv");
  EXPECT_EQ(rows[1][0], "D2");
  EXPECT_EQ(rows[1][3], "gamma");
  EXPECT_GE(std::stod(rows[1][6]), 0.7);
}

TEST_F(CliTest, ReportFormatsPublishedCounts) {
  const auto r = run_cli({"report", "--counts", "16,0,0,2,17,0,0,1,14"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* needle : {"94.0", "100.0", "89.5", "93.3"}) {
    EXPECT_NE(r.out.find(needle), std::string::npos) << needle;
  }
  EXPECT_EQ(run_cli({"report", "--counts", "1,2,3"}).code, 1);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"featurize", "--bogus"}).code, 1);
  EXPECT_EQ(run_cli({"featurize", "--out", path("x").string()}).code, 1);
  EXPECT_EQ(run_cli({"featurize", "--synthetic", "--levels", "4", "--out", path("x").string()}).code, 1);
  const auto missing = run_cli({"featurize", "--data-root", path("nowhere").string(), "--out", path("x").string()});
  EXPECT_EQ(missing.code, 2);
  EXPECT_FALSE(fs::exists(path("x") / "features.csv"));
  EXPECT_EQ(cli::exit_code_for(ErrorCode::SingularSystem), 3);
  EXPECT_EQ(cli::exit_code_for(ErrorCode::InvalidArgument), 1);
  EXPECT_EQ(cli::exit_code_for(ErrorCode::ParseError), 2);
}

TEST_F(CliTest, ReadsSegmentTree) {
  for (const char* dir : {"Z", "N", "S"}) {
    fs::create_directories(path("bonn") / dir);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> x(4097);
      for (std::size_t n = 0; n < x.size(); ++n) x[n] = 50.0 * std::sin(0.01 * (i + 1) * n) + (n % 7);
      write_segment(path("bonn") / dir / (std::string(dir) + std::to_string(1000 + i) + ".txt"), x);
    }
  }
  const auto r = run_cli({"featurize", "--data-root", path("bonn").string(), "--out", path("f").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(path("f") / "features.csv");
  ASSERT_EQ(rows.size(), 300u);
  EXPECT_EQ(rows[0][0], "A/Z1000.txt");
  EXPECT_EQ(rows[299][8], "seizure");
}
