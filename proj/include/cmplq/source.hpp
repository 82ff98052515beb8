#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmplq/rng.hpp"

namespace cmplq {

enum class SourceKind { gaussian, uniform };

std::string_view to_string(SourceKind kind);
/// Accepts "gaussian" or "uniform"; throws std::invalid_argument otherwise.
SourceKind parse_source_kind(std::string_view name);

struct MarginalMoments {
  double mean;
  double variance;
};

/// An iid source: every coordinate is N(0,1) (gaussian) or U[0,1] (uniform).
class SourceModel {
 public:
  SourceModel(SourceKind kind, std::size_t dim);

  SourceKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }

  MarginalMoments marginal_moments() const;
  double marginal_pdf(double x) const;
  /// Interval outside which the marginal carries no mass worth integrating.
  std::pair<double, double> marginal_support() const;
  std::vector<double> mean_vector() const;

  bool operator==(const SourceModel&) const = default;

 private:
  SourceKind kind_;
  std::size_t dim_;
};

/// Row-major block of n points in R^dim.
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(std::size_t dim, std::vector<double> data);
  SampleSet(std::size_t dim, std::size_t n) : dim_(dim), data_(dim * n) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::span<const double> point(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> point(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Philox blocks consumed per sample: each block supplies two coordinates.
inline std::size_t blocks_per_sample(std::size_t dim) { return (dim + 1) / 2; }

/// Draws n iid points, advancing rng by n * blocks_per_sample(dim) blocks.
/// Points are generated in parallel; the result does not depend on the
/// thread count, and equals n successive calls to sample().
SampleSet draw_samples(const SourceModel& source, RngStream& rng, std::size_t n);

/// One draw; repeated calls advance the stream.
std::vector<double> sample(const SourceModel& source, RngStream& rng);

}  // namespace cmplq
