#include "cmplq/source.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cmplq {

std::string_view to_string(SourceKind kind) {
  return kind == SourceKind::gaussian ? "gaussian" : "uniform";
}

SourceKind parse_source_kind(std::string_view name) {
  if (name == "gaussian") return SourceKind::gaussian;
  if (name == "uniform") return SourceKind::uniform;
  throw std::invalid_argument("unknown source '" + std::string(name) + "' (expected gaussian|uniform)");
}

SourceModel::SourceModel(SourceKind kind, std::size_t dim) : kind_(kind), dim_(dim) {
  if (dim == 0) throw std::invalid_argument("source dimension must be >= 1");
}

MarginalMoments SourceModel::marginal_moments() const {
  if (kind_ == SourceKind::gaussian) return {0.0, 1.0};
  return {0.5, 1.0 / 12.0};
}

double SourceModel::marginal_pdf(double x) const {
  if (kind_ == SourceKind::gaussian) return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0;
}

std::pair<double, double> SourceModel::marginal_support() const {
  if (kind_ == SourceKind::gaussian) return {-12.0, 12.0};
  return {0.0, 1.0};
}

std::vector<double> SourceModel::mean_vector() const {
  return std::vector<double>(dim_, marginal_moments().mean);
}

SampleSet::SampleSet(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {
  if (dim == 0 || data_.size() % dim != 0) throw std::invalid_argument("SampleSet: data size is not a multiple of dim");
}

SampleSet draw_samples(const SourceModel& source, RngStream& rng, std::size_t n) {
  const std::size_t dim = source.dim();
  const std::size_t bps = blocks_per_sample(dim);
  const std::uint64_t first = rng.reserve_blocks(static_cast<std::uint64_t>(n) * bps);
  const bool gaussian = source.kind() == SourceKind::gaussian;
  SampleSet out(dim, n);
  double* data = out.data().data();
  const RngStream& gen = rng;

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    double* x = data + i * dim;
    for (std::size_t b = 0; b < bps; ++b) {
      const PhiloxCounter blk = gen.block(first + i * bps + b);
      const auto pair = gaussian ? block_to_normals(blk) : block_to_uniforms(blk);
      x[2 * b] = pair[0];
      if (2 * b + 1 < dim) x[2 * b + 1] = pair[1];
    }
  }
  return out;
}

std::vector<double> sample(const SourceModel& source, RngStream& rng) {
  return draw_samples(source, rng, 1).data();
}

}  // namespace cmplq
