#include "cmplq/estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace cmplq {

namespace {

constexpr std::uint64_t kCentroidStream = 1;
constexpr std::uint64_t kMseStream = 2;

template <typename PassFn>
Codebook centroids_from_passes(const CombinerConfig& config, const SourceModel& source,
                               const EstimationParams& params, PassFn&& pass) {
  if (config.dim() != source.dim()) throw std::invalid_argument("combiner and source dimensions differ");
  kernels::RegionAccumulator acc(config.dim(), config.size());
  acc.add(config, pass(0));
  for (std::size_t round = 1; round <= params.max_topup_rounds && acc.min_count() < params.min_points_per_region;
       ++round)
    acc.add(config, pass(round));

  const std::size_t d = config.dim();
  const double total = static_cast<double>(acc.total());
  std::vector<CodebookEntry> entries;
  entries.reserve(acc.regions());
  for (std::size_t r = 0; r < acc.regions(); ++r) {
    const auto count = static_cast<double>(acc.counts()[r]);
    CodebookEntry e{RegionLabel(config.size(), acc.codes()[r]), std::vector<double>(d), count / total};
    const auto s = acc.sum(r);
    for (std::size_t j = 0; j < d; ++j) e.centroid[j] = s[j] / count;
    entries.push_back(std::move(e));
  }
  return Codebook(d, config.size(), std::move(entries), source.mean_vector());
}

}  // namespace

SampleBank::SampleBank(SourceModel source, EstimationParams params, RngStream rng)
    : source_(source),
      params_(params),
      centroid_rng_(rng.substream(kCentroidStream)),
      mse_rng_(rng.substream(kMseStream)) {
  if (params.n_points_centroids == 0 || params.n_points_mse == 0)
    throw std::invalid_argument("estimation point counts must be positive");
}

const SampleSet& SampleBank::centroid_pass(std::size_t round) {
  while (passes_.size() <= round) passes_.push_back(draw_samples(source_, centroid_rng_, params_.n_points_centroids));
  return passes_[round];
}

const SampleSet& SampleBank::mse_samples() {
  if (!have_mse_) {
    mse_ = draw_samples(source_, mse_rng_, params_.n_points_mse);
    have_mse_ = true;
  }
  return mse_;
}

Codebook estimate_centroids(const CombinerConfig& config, SampleBank& bank) {
  return centroids_from_passes(config, bank.source(), bank.params(),
                               [&](std::size_t round) -> const SampleSet& { return bank.centroid_pass(round); });
}

Codebook estimate_centroids(const CombinerConfig& config, const SourceModel& source, const EstimationParams& params,
                            RngStream& rng) {
  if (params.n_points_centroids == 0) throw std::invalid_argument("n_points_centroids must be positive");
  SampleSet current;
  return centroids_from_passes(config, source, params, [&](std::size_t) -> const SampleSet& {
    current = draw_samples(source, rng, params.n_points_centroids);
    return current;
  });
}

MseEstimate to_mse_estimate(const kernels::ErrorSums& sums) {
  MseEstimate out;
  out.n_points = sums.n;
  if (sums.n == 0) return out;
  const double n = static_cast<double>(sums.n);
  out.value = sums.sum / n;
  if (sums.n > 1) {
    const double var = std::max(0.0, (sums.sum_sq - sums.sum * out.value) / (n - 1.0));
    out.std_error = std::sqrt(var / n);
  }
  return out;
}

MseEstimate estimate_mse(const CombinerConfig& config, const Codebook& codebook, const SampleSet& samples) {
  return to_mse_estimate(kernels::squared_errors(config, codebook, samples));
}

MseEstimate estimate_mse(const QuantizerDesign& design, const SourceModel& source, const EstimationParams& params,
                         RngStream& rng) {
  if (design.source() != source) throw std::invalid_argument("design was built for a different source");
  const SampleSet samples = draw_samples(source, rng, params.n_points_mse);
  return estimate_mse(design.config(), design.codebook(), samples);
}

std::pair<MseEstimate, MseEstimate> estimate_mse_paired(const QuantizerDesign& a, const QuantizerDesign& b,
                                                        const SourceModel& source, const EstimationParams& params,
                                                        RngStream& rng) {
  if (a.source() != source || b.source() != source) throw std::invalid_argument("designs must share the source");
  const SampleSet samples = draw_samples(source, rng, params.n_points_mse);
  return {estimate_mse(a.config(), a.codebook(), samples), estimate_mse(b.config(), b.codebook(), samples)};
}

}  // namespace cmplq
