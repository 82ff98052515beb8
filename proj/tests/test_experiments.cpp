#include <gtest/gtest.h>

#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmplq/design_io.hpp"
#include "cmplq/experiments.hpp"

using namespace cmplq;
namespace fs = std::filesystem;

namespace {

ExperimentSpec small_spec(const fs::path& out) {
  ExperimentSpec s;
  s.source = SourceKind::gaussian;
  s.dim = 1;
  s.k_list = {1};
  s.optimizer.total_iterations = 60;
  s.optimizer.restarts = 2;
  s.optimizer.estimation.n_points_centroids = 20000;
  s.optimizer.estimation.n_points_mse = 20000;
  s.seed = 5;
  s.output_dir = out;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "cmplq_experiments" / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(RunExperiment, ScalarGaussianMatchesLloyd) {
  const auto r = run_experiment(small_spec(fresh_dir("scalar")));
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_NEAR(r.records[0].ratio, 1.0, 0.05);
  EXPECT_EQ(r.records[0].restarts.size(), 2u);
  EXPECT_EQ(r.records[0].comparator_split, std::vector<std::size_t>{1});
  EXPECT_EQ(r.designs.size(), 1u);
}

TEST(RunExperiment, CsvLayout) {
  const auto dir = fresh_dir("csv");
  run_experiment(small_spec(dir));
  std::istringstream csv(slurp(dir / "results.csv"));
  std::string header, row, extra;
  ASSERT_TRUE(std::getline(csv, header));
  ASSERT_TRUE(std::getline(csv, row));
  EXPECT_FALSE(std::getline(csv, extra));
  EXPECT_EQ(header, "k,mse_ours,stderr_ours,regions,mse_lloyd_points,mse_lloyd_comparators,ratio");
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 6);
  EXPECT_EQ(row.substr(0, 2), "1,");

  const auto j = nlohmann::json::parse(slurp(dir / "results.json"));
  EXPECT_EQ(j["records"].size(), 1u);
  EXPECT_FALSE(j.contains("timestamp"));
  EXPECT_NO_THROW(load_design(dir / "design_k1.json"));
}

TEST(RunExperiment, OutputsAreByteIdentical) {
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  auto spec = small_spec(a);
  spec.dim = 2;
  spec.k_list = {1, 2};
  spec.optimizer.total_iterations = 20;
  run_experiment(spec);
  spec.output_dir = b;
  run_experiment(spec);
  EXPECT_EQ(slurp(a / "results.csv"), slurp(b / "results.csv"));
  EXPECT_EQ(slurp(a / "results.json"), slurp(b / "results.json"));
  EXPECT_EQ(slurp(a / "design_k2.json"), slurp(b / "design_k2.json"));
}

TEST(RunExperiment, TimestampIsOptIn) {
  const auto dir = fresh_dir("stamp");
  auto spec = small_spec(dir);
  spec.timestamp = true;
  spec.optimizer.total_iterations = 5;
  run_experiment(spec);
  EXPECT_TRUE(nlohmann::json::parse(slurp(dir / "results.json")).contains("timestamp"));
}

TEST(RunExperiment, RejectsBadSpecs) {
  auto spec = small_spec({});
  spec.k_list = {};
  EXPECT_THROW(run_experiment(spec), std::invalid_argument);
  spec.k_list = {2, 2};
  EXPECT_THROW(run_experiment(spec), std::invalid_argument);
  spec.k_list = {0};
  EXPECT_THROW(run_experiment(spec), std::invalid_argument);
}

TEST(RunExperiment, UnwritableDirectory) {
  if (geteuid() == 0) {
    // Permission bits do not bind root; a regular file in the path still blocks creation.
    const auto blocker = fresh_dir("blocker");
    fs::create_directories(blocker.parent_path());
    std::ofstream(blocker) << "x";
    EXPECT_THROW(run_experiment(small_spec(blocker / "sub")), std::runtime_error);
    return;
  }
  const auto dir = fresh_dir("readonly");
  fs::create_directories(dir);
  fs::permissions(dir, fs::perms::owner_read | fs::perms::owner_exec);
  EXPECT_THROW(run_experiment(small_spec(dir)), std::runtime_error);
  fs::permissions(dir, fs::perms::owner_all);
}

TEST(ParamsHash, SensitiveToEveryField) {
  OptimizerParams a;
  OptimizerParams b = a;
  EXPECT_EQ(params_hash(a), params_hash(b));
  b.estimation.min_points_per_region += 1;
  EXPECT_NE(params_hash(a), params_hash(b));
  b = a;
  b.step_decay = 0.97;
  EXPECT_NE(params_hash(a), params_hash(b));
}
