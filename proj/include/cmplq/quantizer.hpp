#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "cmplq/geometry.hpp"
#include "cmplq/source.hpp"

namespace cmplq {

/// Maps comparator bits to a dense index. Uses a flat table for small k and
/// a hash map otherwise.
class LabelIndex {
 public:
  static constexpr std::int32_t kMissing = -1;
  static constexpr std::size_t kDenseLimit = 20;

  explicit LabelIndex(std::size_t k);

  std::int32_t find(std::uint64_t bits) const {
    if (dense_) return table_[bits];
    auto it = map_.find(bits);
    return it == map_.end() ? kMissing : it->second;
  }
  /// Returns the existing index or assigns `next`.
  std::int32_t find_or_insert(std::uint64_t bits, std::int32_t next);

 private:
  bool dense_;
  std::vector<std::int32_t> table_;
  std::unordered_map<std::uint64_t, std::int32_t> map_;
};

struct CodebookEntry {
  RegionLabel label;
  std::vector<double> centroid;
  /// Estimated probability mass of the region.
  double weight = 0.0;
};

/// Reconstruction points keyed by region label, sorted by label. Labels not
/// in the codebook decode to the fallback point.
class Codebook {
 public:
  static constexpr double kWeightTolerance = 1e-6;

  /// Validates lengths, label uniqueness and that nonempty weights sum to 1.
  Codebook(std::size_t dim, std::size_t k, std::vector<CodebookEntry> entries, std::vector<double> fallback);

  std::size_t dim() const { return dim_; }
  std::size_t comparators() const { return k_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<CodebookEntry>& entries() const { return entries_; }
  std::span<const double> fallback() const { return fallback_; }

  /// Index into entries(), or LabelIndex::kMissing.
  std::int32_t find(std::uint64_t bits) const { return index_.find(bits); }
  /// Centroid for the label bits, or the fallback.
  std::span<const double> reconstruction(std::uint64_t bits) const {
    const std::int32_t i = index_.find(bits);
    return i == LabelIndex::kMissing ? std::span<const double>(fallback_)
                                     : std::span<const double>(flat_.data() + i * dim_, dim_);
  }

  /// Same codebook with coordinate j of every key flipped.
  Codebook with_flipped_coordinate(std::size_t j) const;

  bool operator==(const Codebook& other) const;

 private:
  std::size_t dim_;
  std::size_t k_;
  std::vector<CodebookEntry> entries_;
  std::vector<double> fallback_;
  std::vector<double> flat_;
  LabelIndex index_;
};

struct MseEstimate {
  double value = 0.0;
  /// Sample standard deviation of the per-point squared errors over sqrt(n).
  double std_error = 0.0;
  std::size_t n_points = 0;

  bool operator==(const MseEstimate&) const = default;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::size_t iterations = 0;
  std::size_t restarts = 1;

  bool operator==(const Provenance&) const = default;
};

/// A complete comparison-limited quantizer: combiner, codebook and the
/// source it was designed for.
class QuantizerDesign {
 public:
  QuantizerDesign(CombinerConfig config, Codebook codebook, SourceModel source, MseEstimate mse,
                  Provenance provenance = {});

  const CombinerConfig& config() const { return config_; }
  const Codebook& codebook() const { return codebook_; }
  const SourceModel& source() const { return source_; }
  const MseEstimate& mse() const { return mse_; }
  const Provenance& provenance() const { return provenance_; }
  std::size_t dim() const { return config_.dim(); }
  std::size_t comparators() const { return config_.size(); }
  std::size_t occupied_regions() const { return codebook_.size(); }

  bool operator==(const QuantizerDesign&) const = default;

 private:
  CombinerConfig config_;
  Codebook codebook_;
  SourceModel source_;
  MseEstimate mse_;
  Provenance provenance_;
};

RegionLabel encode(const QuantizerDesign& design, std::span<const double> x);
/// Throws std::invalid_argument when the label length differs from k.
std::vector<double> decode(const QuantizerDesign& design, const RegionLabel& label);
std::vector<double> quantize(const QuantizerDesign& design, std::span<const double> x);

}  // namespace cmplq
