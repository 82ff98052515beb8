#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "cmplq/design_io.hpp"
#include "cmplq/optimizer.hpp"

using namespace cmplq;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "cmplq_design_io";
  fs::create_directories(dir);
  return dir / name;
}

QuantizerDesign small_design() {
  OptimizerParams p;
  p.total_iterations = 10;
  p.estimation.n_points_centroids = 5000;
  p.estimation.n_points_mse = 5000;
  return optimize(SourceModel(SourceKind::gaussian, 3), 4, p, RngStream(77, 5)).design;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string error_of(const nlohmann::json& j) {
  try {
    design_from_json(j);
  } catch (const DesignFormatError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(DesignIo, RoundTripIsLossless) {
  const auto d = small_design();
  const auto path = scratch("round_trip.json");
  save_design(d, path);
  const auto back = load_design(path);
  EXPECT_EQ(back, d);
  EXPECT_EQ(back.provenance().seed, 77u);
  EXPECT_EQ(back.provenance().stream_id, 5u);
  EXPECT_EQ(design_to_json(back), design_to_json(d));

  const std::vector<double> x{0.3, -1.2, 0.8};
  EXPECT_EQ(quantize(back, x), quantize(d, x));
}

TEST(DesignIo, SchemaFields) {
  const auto j = design_to_json(small_design());
  for (const char* key : {"dim", "k", "source", "seed", "stream_id", "iterations", "restarts", "V", "t", "codebook",
                          "mse_estimate", "mse_std_error", "mse_points"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["V"].size(), 12u);
  EXPECT_EQ(j["t"].size(), 4u);
  EXPECT_EQ(j["source"], "gaussian");
}

TEST(DesignIo, TruncatedFileIsAFormatError) {
  const auto path = scratch("truncated.json");
  save_design(small_design(), path);
  const auto size = fs::file_size(path);
  fs::resize_file(path, size / 2);
  try {
    load_design(path);
    ADD_FAILURE() << "truncated file loaded";
  } catch (const DesignFormatError& e) {
    EXPECT_NE(std::string(e.what()).find("missing field '"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_design(scratch("does_not_exist.json")), std::runtime_error);
}

TEST(DesignIo, MissingFieldIsNamed) {
  auto j = design_to_json(small_design());
  j.erase("t");
  EXPECT_NE(error_of(j).find("missing field 't'"), std::string::npos) << error_of(j);
}

TEST(DesignIo, LabelLengthMismatch) {
  OptimizerParams p;
  p.total_iterations = 5;
  p.estimation.n_points_centroids = 2000;
  p.estimation.n_points_mse = 2000;
  auto j = design_to_json(optimize(SourceModel(SourceKind::uniform, 2), 2, p, RngStream(1, 0)).design);
  j["codebook"][0]["label"] = {1, -1, 1};
  EXPECT_NE(error_of(j).find("must have 2 entries"), std::string::npos) << error_of(j);
}

TEST(DesignIo, NonUnitNormalRejected) {
  auto j = design_to_json(small_design());
  j["V"][0] = j["V"][0].get<double>() * 1.5 + 0.1;
  EXPECT_FALSE(error_of(j).empty());

  auto bad_source = design_to_json(small_design());
  bad_source["source"] = "laplace";
  EXPECT_FALSE(error_of(bad_source).empty());
}

TEST(DesignIo, GarbageTextIsAFormatError) {
  const auto path = scratch("garbage.json");
  write_text(path, "not json at all");
  EXPECT_THROW(load_design(path), DesignFormatError);
  write_text(path, "[1, 2, 3]");
  EXPECT_THROW(load_design(path), DesignFormatError);
}
