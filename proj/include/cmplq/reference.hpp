#pragma once

// Serial reference versions of the kernels, written as plain loops over the
// samples. Kept for testing and benchmarking the OpenMP kernels.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "cmplq/geometry.hpp"
#include "cmplq/kernels.hpp"
#include "cmplq/quantizer.hpp"
#include "cmplq/source.hpp"

namespace cmplq::reference {

struct RegionStats {
  std::vector<double> sum;
  std::uint64_t count = 0;
};

/// Assigns every sample to its region and accumulates sums and counts.
std::map<RegionLabel, RegionStats> accumulate_regions(const CombinerConfig& config, std::span<const SampleSet> passes);

/// Centroids and weights from the accumulated statistics.
Codebook centroids(const CombinerConfig& config, const SourceModel& source, std::span<const SampleSet> passes);

kernels::ErrorSums squared_errors(const CombinerConfig& config, const Codebook& codebook, const SampleSet& samples);

kernels::ErrorSums nearest_errors(std::span<const double> points, const SampleSet& samples);

}  // namespace cmplq::reference
