#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "cmplq/geometry.hpp"
#include "cmplq/kernels.hpp"
#include "cmplq/quantizer.hpp"
#include "cmplq/rng.hpp"
#include "cmplq/source.hpp"

namespace cmplq {

struct EstimationParams {
  std::size_t n_points_centroids = 100000;
  std::size_t n_points_mse = 100000;
  /// Regions below this count after a pass trigger another centroid pass.
  std::size_t min_points_per_region = 50;
  /// Bound on the extra passes; regions still short keep their available mean.
  std::size_t max_topup_rounds = 5;

  EstimationParams scaled(std::size_t factor) const {
    EstimationParams p = *this;
    p.n_points_centroids *= factor;
    p.n_points_mse *= factor;
    return p;
  }
  bool operator==(const EstimationParams&) const = default;
};

/// Fixed sample sets shared by every configuration evaluated against them
/// (common random numbers). Centroid passes are generated lazily, in order.
class SampleBank {
 public:
  SampleBank(SourceModel source, EstimationParams params, RngStream rng);

  const SourceModel& source() const { return source_; }
  const EstimationParams& params() const { return params_; }

  /// Pass 0 is the base pass; passes 1..max_topup_rounds are top-ups.
  const SampleSet& centroid_pass(std::size_t round);
  const SampleSet& mse_samples();

 private:
  SourceModel source_;
  EstimationParams params_;
  RngStream centroid_rng_;
  RngStream mse_rng_;
  std::vector<SampleSet> passes_;
  SampleSet mse_;
  bool have_mse_ = false;
};

/// Centroids and weights of the occupied regions (base pass plus top-ups).
Codebook estimate_centroids(const CombinerConfig& config, SampleBank& bank);
/// Draws the base and top-up passes directly from rng.
Codebook estimate_centroids(const CombinerConfig& config, const SourceModel& source, const EstimationParams& params,
                            RngStream& rng);

MseEstimate to_mse_estimate(const kernels::ErrorSums& sums);

/// Mean total squared error per d-vector over the given samples.
MseEstimate estimate_mse(const CombinerConfig& config, const Codebook& codebook, const SampleSet& samples);
/// n_points_mse fresh draws from rng.
MseEstimate estimate_mse(const QuantizerDesign& design, const SourceModel& source, const EstimationParams& params,
                         RngStream& rng);

/// Both designs scored on one sample stream.
std::pair<MseEstimate, MseEstimate> estimate_mse_paired(const QuantizerDesign& a, const QuantizerDesign& b,
                                                        const SourceModel& source, const EstimationParams& params,
                                                        RngStream& rng);

inline double per_coordinate_mse(const MseEstimate& mse, std::size_t dim) { return mse.value / static_cast<double>(dim); }

}  // namespace cmplq
