#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "cmplq/baseline.hpp"
#include "cmplq/optimizer.hpp"
#include "cmplq/quantizer.hpp"
#include "cmplq/rng.hpp"
#include "cmplq/source.hpp"

namespace cmplq {

struct ExperimentSpec {
  SourceKind source = SourceKind::gaussian;
  std::size_t dim = 2;
  /// Nonempty, strictly ascending, entries >= 1.
  std::vector<std::size_t> k_list;
  OptimizerParams optimizer;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  /// Adds a wall-clock timestamp to the JSON output (breaks byte-identical reruns).
  bool timestamp = false;

  void validate() const;
};

struct RestartSummary {
  std::size_t restart;
  MseEstimate mse;
  std::size_t regions;
};

struct ExperimentRecord {
  std::size_t k = 0;
  MseEstimate ours;
  std::size_t regions = 0;
  MseEstimate lloyd_points;
  MseEstimate lloyd_comparators;
  std::vector<std::size_t> comparator_split;
  double lloyd_comparators_analytic = 0.0;
  /// ours / lloyd_comparators, both on the common evaluation samples.
  double ratio = 0.0;
  std::vector<RestartSummary> restarts;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<ExperimentRecord> records;
  std::vector<QuantizerDesign> designs;
  std::uint64_t params_hash = 0;
  std::string timestamp;
};

/// Stream used for the design at resolution k under master seed `seed`;
/// shared by `cmplq design` and `cmplq sweep`.
RngStream design_stream(std::uint64_t seed, std::size_t k);
RngStream evaluation_stream(std::uint64_t seed, std::size_t k);
RngStream lloyd_stream(std::uint64_t seed, std::size_t k);

nlohmann::json params_to_json(const OptimizerParams& params);
/// FNV-1a over the compact JSON of the parameters.
std::uint64_t params_hash(const OptimizerParams& params);

/// For every k: multi-restart design, matched-points generalized Lloyd
/// baseline (as many points as occupied regions), matched-comparators
/// product baseline; all three scored on one common evaluation sample set
/// of 4 * n_points_mse draws. Writes results.csv, results.json and
/// design_k<k>.json to spec.output_dir (when nonempty). Fails before any
/// computation if the directory is not writable. Progress goes to `log`.
ExperimentResult run_experiment(const ExperimentSpec& spec, std::ostream* log = nullptr);

/// Header `k,mse_ours,stderr_ours,regions,mse_lloyd_points,mse_lloyd_comparators,ratio`,
/// one row per k, 9 significant digits, LF endings.
void emit_csv(const ExperimentResult& result, const std::filesystem::path& path);
void emit_json(const ExperimentResult& result, const std::filesystem::path& path);

/// Creates the directory if needed and checks a file can be written there.
void ensure_writable_directory(const std::filesystem::path& dir);

}  // namespace cmplq
