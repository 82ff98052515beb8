#pragma once

// Data-parallel inner loops of the Monte Carlo estimators. Every reduction
// runs over fixed-size chunks that are combined in chunk order, so results
// are bit-identical for any OpenMP thread count. The serial reference in
// reference.hpp implements the same quantities with plain loops.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cmplq/geometry.hpp"
#include "cmplq/quantizer.hpp"
#include "cmplq/source.hpp"

namespace cmplq::kernels {

inline constexpr std::size_t kChunk = 8192;

struct ErrorSums {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;
};

/// codes[i] = sign_bits(config, samples.point(i))
void compute_codes(const CombinerConfig& config, const SampleSet& samples, std::span<std::uint64_t> codes);

/// Per-region point counts and coordinate sums, regions numbered in order
/// of first appearance across all added passes.
class RegionAccumulator {
 public:
  RegionAccumulator(std::size_t dim, std::size_t k);

  void add(const CombinerConfig& config, const SampleSet& samples);

  std::size_t dim() const { return dim_; }
  std::size_t regions() const { return codes_.size(); }
  std::size_t total() const { return total_; }
  const std::vector<std::uint64_t>& codes() const { return codes_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::span<const double> sum(std::size_t region) const { return {sums_.data() + region * dim_, dim_}; }
  std::uint64_t min_count() const;

 private:
  std::size_t dim_;
  std::size_t k_;
  std::size_t total_ = 0;
  LabelIndex index_;
  std::vector<std::uint64_t> codes_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> sums_;
  std::vector<std::uint64_t> scratch_codes_;
  std::vector<std::int32_t> scratch_regions_;
};

/// Sums of ||x - reconstruction(x)||^2 and its square over the samples.
ErrorSums squared_errors(const CombinerConfig& config, const Codebook& codebook, const SampleSet& samples);

/// Nearest point (Euclidean, lowest index on ties) for every sample.
/// `points` is row-major with samples.dim() columns.
void nearest_points(std::span<const double> points, const SampleSet& samples, std::span<std::int32_t> assignment,
                    std::span<double> dist2);

/// Squared-error sums of nearest-point quantization.
ErrorSums nearest_errors(std::span<const double> points, const SampleSet& samples);

}  // namespace cmplq::kernels
