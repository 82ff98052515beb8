#include "cmplq/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cmplq {

LabelIndex::LabelIndex(std::size_t k) : dense_(k <= kDenseLimit) {
  if (dense_) table_.assign(std::size_t{1} << k, kMissing);
}

std::int32_t LabelIndex::find_or_insert(std::uint64_t bits, std::int32_t next) {
  if (dense_) {
    std::int32_t& slot = table_[bits];
    if (slot == kMissing) slot = next;
    return slot;
  }
  return map_.try_emplace(bits, next).first->second;
}

Codebook::Codebook(std::size_t dim, std::size_t k, std::vector<CodebookEntry> entries, std::vector<double> fallback)
    : dim_(dim), k_(k), entries_(std::move(entries)), fallback_(std::move(fallback)), index_(k) {
  if (fallback_.size() != dim_) throw std::invalid_argument("codebook fallback has wrong dimension");
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
  double total = 0.0;
  flat_.reserve(entries_.size() * dim_);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.label.size() != k_)
      throw std::invalid_argument("codebook label " + std::to_string(i) + " has length " +
                                  std::to_string(e.label.size()) + ", expected " + std::to_string(k_));
    if (e.centroid.size() != dim_)
      throw std::invalid_argument("codebook centroid " + std::to_string(i) + " has wrong dimension");
    if (!(e.weight >= 0.0 && e.weight <= 1.0 + kWeightTolerance))
      throw std::invalid_argument("codebook weight " + std::to_string(i) + " outside [0, 1]");
    if (index_.find_or_insert(e.label.bits(), static_cast<std::int32_t>(i)) != static_cast<std::int32_t>(i))
      throw std::invalid_argument("duplicate codebook label");
    flat_.insert(flat_.end(), e.centroid.begin(), e.centroid.end());
    total += e.weight;
  }
  if (!entries_.empty() && std::abs(total - 1.0) > kWeightTolerance)
    throw std::invalid_argument("codebook weights sum to " + std::to_string(total) + ", expected 1");
}

Codebook Codebook::with_flipped_coordinate(std::size_t j) const {
  std::vector<CodebookEntry> flipped(entries_);
  for (auto& e : flipped) e.label = e.label.flipped(j);
  return Codebook(dim_, k_, std::move(flipped), fallback_);
}

bool Codebook::operator==(const Codebook& other) const {
  if (dim_ != other.dim_ || k_ != other.k_ || fallback_ != other.fallback_ || entries_.size() != other.entries_.size())
    return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.label != b.label || a.centroid != b.centroid || a.weight != b.weight) return false;
  }
  return true;
}

QuantizerDesign::QuantizerDesign(CombinerConfig config, Codebook codebook, SourceModel source, MseEstimate mse,
                                 Provenance provenance)
    : config_(std::move(config)),
      codebook_(std::move(codebook)),
      source_(source),
      mse_(mse),
      provenance_(provenance) {
  if (config_.dim() != source_.dim() || codebook_.dim() != source_.dim())
    throw std::invalid_argument("design dimensions disagree (config, codebook, source)");
  if (codebook_.comparators() != config_.size())
    throw std::invalid_argument("codebook label length differs from the number of comparators");
  if (!(mse_.value >= 0.0) || !(mse_.std_error >= 0.0)) throw std::invalid_argument("MSE estimate must be nonnegative");
  const auto mean = source_.mean_vector();
  if (!std::equal(mean.begin(), mean.end(), codebook_.fallback().begin()))
    throw std::invalid_argument("codebook fallback must equal the source mean");
}

RegionLabel encode(const QuantizerDesign& design, std::span<const double> x) { return sign_vector(design.config(), x); }

std::vector<double> decode(const QuantizerDesign& design, const RegionLabel& label) {
  if (label.size() != design.comparators())
    throw std::invalid_argument("label has length " + std::to_string(label.size()) + ", expected " +
                                std::to_string(design.comparators()));
  auto r = design.codebook().reconstruction(label.bits());
  return {r.begin(), r.end()};
}

std::vector<double> quantize(const QuantizerDesign& design, std::span<const double> x) {
  return decode(design, encode(design, x));
}

}  // namespace cmplq
