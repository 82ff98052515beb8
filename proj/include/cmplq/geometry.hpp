#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <vector>

#include "cmplq/rng.hpp"
#include "cmplq/source.hpp"

namespace cmplq {

/// Largest resolution a RegionLabel can carry.
inline constexpr std::size_t kMaxComparators = 62;

/// Affine hyperplane {x : <normal, x> + offset = 0}, stored with unit normal.
class Hyperplane {
 public:
  /// Rescales (normal, offset) so that |normal| = 1. Throws on a zero normal.
  Hyperplane(std::vector<double> normal, double offset);

  std::span<const double> normal() const { return normal_; }
  double offset() const { return offset_; }
  std::size_t dim() const { return normal_.size(); }

  /// <normal, x> + offset
  double evaluate(std::span<const double> x) const;
  Hyperplane negated() const;

  bool operator==(const Hyperplane&) const = default;

 private:
  std::vector<double> normal_;
  double offset_;
};

/// Comparator word: entry j is +1 when comparator j fires (<v_j,x>+t_j >= 0).
/// Bit j of bits() is set iff entry j is +1. Ordered lexicographically over
/// the sign entries with -1 < +1.
class RegionLabel {
 public:
  RegionLabel() = default;
  RegionLabel(std::size_t k, std::uint64_t bits);
  /// Entries must be -1 or +1.
  explicit RegionLabel(std::span<const int> signs);

  std::size_t size() const { return k_; }
  std::uint64_t bits() const { return bits_; }
  int operator[](std::size_t j) const { return (bits_ >> j & 1u) ? 1 : -1; }
  std::vector<int> signs() const;
  RegionLabel flipped(std::size_t j) const { return {k_, bits_ ^ (std::uint64_t{1} << j)}; }

  bool operator==(const RegionLabel&) const = default;
  std::strong_ordering operator<=>(const RegionLabel& other) const;

 private:
  std::size_t k_ = 0;
  std::uint64_t bits_ = 0;
};

/// The linear combiner [V, t]: k hyperplanes in R^dim. Rows of V have unit norm.
class CombinerConfig {
 public:
  explicit CombinerConfig(std::size_t dim);
  CombinerConfig(std::size_t dim, const std::vector<Hyperplane>& planes);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return offsets_.size(); }

  Hyperplane hyperplane(std::size_t j) const;
  std::span<const double> normal(std::size_t j) const { return {weights_.data() + j * dim_, dim_}; }
  double offset(std::size_t j) const { return offsets_[j]; }
  /// Row-major k x dim matrix V.
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& offsets() const { return offsets_; }

  CombinerConfig with_hyperplane(std::size_t j, const Hyperplane& plane) const;
  CombinerConfig negated(std::size_t j) const;

  bool operator==(const CombinerConfig&) const = default;

 private:
  std::size_t dim_;
  std::vector<double> weights_;
  std::vector<double> offsets_;
};

/// r(m, n) = sum_{i=0}^{min(m,n)} C(n, i), saturating at UINT64_MAX.
std::uint64_t region_count_upper_bound(std::uint64_t m, std::uint64_t n);

/// Comparator bits for x (bit j set iff <v_j,x>+t_j >= 0). No dimension check.
std::uint64_t sign_bits(const CombinerConfig& config, std::span<const double> x);

/// Throws std::invalid_argument when x.size() != config.dim().
RegionLabel sign_vector(const CombinerConfig& config, std::span<const double> x);

/// Determinant tolerance applied to unit-normalized rows.
inline constexpr double kGeneralPositionTol = 1e-9;

/// True iff every min(k,d)-subset of normals is linearly independent
/// (|det| > kGeneralPositionTol) and, when k > d, no d+1 hyperplanes share
/// a point.
bool is_general_position(const CombinerConfig& config);

/// Distinct labels observed on n_samples draws from source.
std::set<RegionLabel> enumerate_regions_sampled(const CombinerConfig& config, const SourceModel& source,
                                                std::size_t n_samples, RngStream& rng);

/// Lower-triangular table over an ordered list of regions. at(i, j) for
/// i > j is the 1-indexed hyperplane separating regions i and j when their
/// labels differ in exactly one coordinate, 0 otherwise.
class SeparationMatrix {
 public:
  explicit SeparationMatrix(std::size_t size);

  std::size_t size() const { return size_; }
  /// Requires i > j.
  int at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, int value);

 private:
  std::size_t index(std::size_t i, std::size_t j) const;

  std::size_t size_;
  std::vector<int> entries_;
};

/// Throws std::invalid_argument on duplicate labels or mixed lengths.
SeparationMatrix separation_matrix(std::span<const RegionLabel> labels);

}  // namespace cmplq

template <>
struct std::hash<cmplq::RegionLabel> {
  std::size_t operator()(const cmplq::RegionLabel& l) const noexcept {
    return std::hash<std::uint64_t>{}(l.bits() * 0x9E3779B97F4A7C15ull ^ l.size());
  }
};
