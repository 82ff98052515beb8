#include "cmplq/kernels.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace cmplq::kernels {

namespace {

std::ptrdiff_t chunk_count(std::size_t n) { return static_cast<std::ptrdiff_t>((n + kChunk - 1) / kChunk); }

template <typename PointError>
ErrorSums chunked_error_sums(std::size_t n, PointError&& error) {
  const std::ptrdiff_t chunks = chunk_count(n);
  std::vector<double> sums(chunks), sums_sq(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const double e = error(i);
      s += e;
      s2 += e * e;
    }
    sums[c] = s;
    sums_sq[c] = s2;
  }
  ErrorSums out;
  out.n = n;
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    out.sum += sums[c];
    out.sum_sq += sums_sq[c];
  }
  return out;
}

}  // namespace

void compute_codes(const CombinerConfig& config, const SampleSet& samples, std::span<std::uint64_t> codes) {
  if (samples.dim() != config.dim()) throw std::invalid_argument("sample and combiner dimensions differ");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) codes[i] = sign_bits(config, samples.point(i));
}

RegionAccumulator::RegionAccumulator(std::size_t dim, std::size_t k) : dim_(dim), k_(k), index_(k) {}

void RegionAccumulator::add(const CombinerConfig& config, const SampleSet& samples) {
  if (config.size() != k_ || config.dim() != dim_ || samples.dim() != dim_)
    throw std::invalid_argument("RegionAccumulator: configuration or samples do not match");
  const std::size_t n = samples.size();
  scratch_codes_.resize(n);
  scratch_regions_.resize(n);
  compute_codes(config, samples, scratch_codes_);

  for (std::size_t i = 0; i < n; ++i) {
    const auto next = static_cast<std::int32_t>(codes_.size());
    const std::int32_t r = index_.find_or_insert(scratch_codes_[i], next);
    if (r == next) codes_.push_back(scratch_codes_[i]);
    scratch_regions_[i] = r;
  }
  const std::size_t regions = codes_.size();
  counts_.resize(regions, 0);
  sums_.resize(regions * dim_, 0.0);

  const std::ptrdiff_t chunks = chunk_count(n);
  const std::size_t stride = regions * (dim_ + 1);
  std::vector<double> partial(chunks * stride, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    double* acc = partial.data() + c * stride;
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      double* slot = acc + scratch_regions_[i] * (dim_ + 1);
      const auto x = samples.point(i);
      for (std::size_t j = 0; j < dim_; ++j) slot[j] += x[j];
      slot[dim_] += 1.0;
    }
  }
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const double* acc = partial.data() + c * stride;
    for (std::size_t r = 0; r < regions; ++r) {
      const double* slot = acc + r * (dim_ + 1);
      for (std::size_t j = 0; j < dim_; ++j) sums_[r * dim_ + j] += slot[j];
      counts_[r] += static_cast<std::uint64_t>(slot[dim_]);
    }
  }
  total_ += n;
}

std::uint64_t RegionAccumulator::min_count() const {
  return counts_.empty() ? 0 : *std::min_element(counts_.begin(), counts_.end());
}

ErrorSums squared_errors(const CombinerConfig& config, const Codebook& codebook, const SampleSet& samples) {
  if (samples.dim() != config.dim() || codebook.dim() != config.dim())
    throw std::invalid_argument("squared_errors: dimensions differ");
  const std::size_t d = config.dim();
  return chunked_error_sums(samples.size(), [&](std::size_t i) {
    const auto x = samples.point(i);
    const auto c = codebook.reconstruction(sign_bits(config, x));
    double e = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = x[j] - c[j];
      e += diff * diff;
    }
    return e;
  });
}

namespace {

inline std::pair<std::int32_t, double> nearest(std::span<const double> points, std::size_t d,
                                               std::span<const double> x) {
  const std::size_t m = points.size() / d;
  std::int32_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < m; ++p) {
    const double* c = points.data() + p * d;
    double d2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = x[j] - c[j];
      d2 += diff * diff;
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<std::int32_t>(p);
    }
  }
  return {best, best_d2};
}

}  // namespace

void nearest_points(std::span<const double> points, const SampleSet& samples, std::span<std::int32_t> assignment,
                    std::span<double> dist2) {
  const std::size_t d = samples.dim();
  if (d == 0 || points.empty() || points.size() % d != 0) throw std::invalid_argument("nearest_points: bad codebook");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto [p, d2] = nearest(points, d, samples.point(i));
    assignment[i] = p;
    dist2[i] = d2;
  }
}

ErrorSums nearest_errors(std::span<const double> points, const SampleSet& samples) {
  const std::size_t d = samples.dim();
  if (d == 0 || points.empty() || points.size() % d != 0) throw std::invalid_argument("nearest_errors: bad codebook");
  return chunked_error_sums(samples.size(), [&](std::size_t i) { return nearest(points, d, samples.point(i)).second; });
}

}  // namespace cmplq::kernels
