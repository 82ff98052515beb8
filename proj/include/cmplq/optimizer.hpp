#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cmplq/estimation.hpp"
#include "cmplq/geometry.hpp"
#include "cmplq/quantizer.hpp"
#include "cmplq/rng.hpp"
#include "cmplq/source.hpp"

namespace cmplq {

struct OptimizerParams {
  std::size_t total_iterations = 200;
  std::size_t candidates_per_iteration = 8;
  /// P(global update at iteration i) = exp(-global_prob_decay * i), i from 1.
  double global_prob_decay = 0.1;
  /// Perturbation scale at iteration i = initial_step * step_decay^i.
  double initial_step = 1.0;
  double step_decay = 0.98;
  std::size_t restarts = 5;
  EstimationParams estimation;

  double step_at(std::size_t iteration) const;
  double global_probability(std::size_t iteration) const;
  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;

  bool operator==(const OptimizerParams&) const = default;
};

enum class UpdateKind { global, local };

struct TraceRecord {
  std::size_t iteration;
  double accepted_mse;
  UpdateKind kind;
  std::size_t occupied_regions;
};

struct OptimizationTrace {
  double initial_mse = 0.0;
  std::vector<TraceRecord> records;
};

/// k hyperplanes with sphere-uniform normals, each crossing the bulk of the
/// source: gaussian offsets ~ N(0,1); uniform hyperplanes pass through a
/// uniform point of the unit cube.
CombinerConfig random_configuration(std::size_t dim, std::size_t k, const SourceModel& source, RngStream& rng);

/// candidates_per_iteration copies with every normal jittered isotropically
/// (then renormalized) and every offset shifted, both at step_at(iteration).
/// Normals turn about `pivot` (the origin when empty): a changed normal keeps
/// the plane's signed distance from the pivot.
std::vector<CombinerConfig> global_update(const CombinerConfig& config, std::size_t iteration,
                                          const OptimizerParams& params, RngStream& rng,
                                          std::span<const double> pivot = {});

/// Moves one randomly chosen variable of one randomly chosen hyperplane:
/// an offset is swept over a uniform grid spanning +-2 step_at(iteration);
/// a normal coordinate gets Gaussian jitter followed by renormalization,
/// turning about `pivot` as in global_update.
/// Throws std::invalid_argument when config has no hyperplanes.
std::vector<CombinerConfig> local_update(const CombinerConfig& config, std::size_t iteration,
                                         const OptimizerParams& params, RngStream& rng,
                                         std::span<const double> pivot = {});

struct OptimizeResult {
  QuantizerDesign design;
  OptimizationTrace trace;
};

/// Alternates centroid estimation and configuration search on fixed common
/// sample sets, accepting the best of incumbent and candidates each
/// iteration. The returned design is re-estimated on fresh samples with 4x
/// the estimation points.
OptimizeResult optimize(const SourceModel& source, std::size_t k, const OptimizerParams& params, RngStream rng);

struct RestartResult {
  std::size_t restart;
  QuantizerDesign design;
  OptimizationTrace trace;
};

struct MultiRestartResult {
  /// Lowest-MSE restart, with provenance naming the master stream and the
  /// restart count.
  QuantizerDesign design;
  std::size_t best_index;
  std::vector<RestartResult> restarts;
};

/// params.restarts runs of optimize; run 0 uses rng itself, run r > 0 an
/// independent substream. The best has the lowest final MSE (first wins ties).
MultiRestartResult multi_restart(const SourceModel& source, std::size_t k, const OptimizerParams& params, RngStream rng);

}  // namespace cmplq
