#include "cmplq/reference.hpp"

#include <limits>

namespace cmplq::reference {

namespace {

// Linear scan over the entries; independent of the codebook's label index.
std::vector<double> decode_reference(const Codebook& codebook, const RegionLabel& label) {
  for (const auto& e : codebook.entries())
    if (e.label == label) return e.centroid;
  return {codebook.fallback().begin(), codebook.fallback().end()};
}

}  // namespace

std::map<RegionLabel, RegionStats> accumulate_regions(const CombinerConfig& config, std::span<const SampleSet> passes) {
  std::map<RegionLabel, RegionStats> regions;
  for (const auto& samples : passes) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto x = samples.point(i);
      auto& stats = regions[sign_vector(config, x)];
      if (stats.sum.empty()) stats.sum.assign(x.size(), 0.0);
      for (std::size_t j = 0; j < x.size(); ++j) stats.sum[j] += x[j];
      ++stats.count;
    }
  }
  return regions;
}

Codebook centroids(const CombinerConfig& config, const SourceModel& source, std::span<const SampleSet> passes) {
  const auto regions = accumulate_regions(config, passes);
  std::uint64_t total = 0;
  for (const auto& [label, stats] : regions) total += stats.count;
  std::vector<CodebookEntry> entries;
  for (const auto& [label, stats] : regions) {
    CodebookEntry e{label, stats.sum, static_cast<double>(stats.count) / static_cast<double>(total)};
    for (double& v : e.centroid) v /= static_cast<double>(stats.count);
    entries.push_back(std::move(e));
  }
  return Codebook(config.dim(), config.size(), std::move(entries), source.mean_vector());
}

kernels::ErrorSums squared_errors(const CombinerConfig& config, const Codebook& codebook, const SampleSet& samples) {
  kernels::ErrorSums out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto x = samples.point(i);
    const auto c = decode_reference(codebook, sign_vector(config, x));
    double e = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) e += (x[j] - c[j]) * (x[j] - c[j]);
    out.sum += e;
    out.sum_sq += e * e;
    ++out.n;
  }
  return out;
}

kernels::ErrorSums nearest_errors(std::span<const double> points, const SampleSet& samples) {
  const std::size_t d = samples.dim();
  kernels::ErrorSums out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto x = samples.point(i);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p * d < points.size(); ++p) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < d; ++j) d2 += (x[j] - points[p * d + j]) * (x[j] - points[p * d + j]);
      best = std::min(best, d2);
    }
    out.sum += best;
    out.sum_sq += best * best;
    ++out.n;
  }
  return out;
}

}  // namespace cmplq::reference
