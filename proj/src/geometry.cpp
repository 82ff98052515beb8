#include "cmplq/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cmplq {

Hyperplane::Hyperplane(std::vector<double> normal, double offset) : normal_(std::move(normal)), offset_(offset) {
  double norm2 = 0.0;
  for (double v : normal_) norm2 += v * v;
  const double norm = std::sqrt(norm2);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("hyperplane normal must be nonzero and finite");
  // Already-unit normals are kept bit-for-bit so canonicalization is idempotent.
  if (std::abs(norm - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) return;
  for (double& v : normal_) v /= norm;
  offset_ /= norm;
}

double Hyperplane::evaluate(std::span<const double> x) const {
  double s = offset_;
  for (std::size_t i = 0; i < normal_.size(); ++i) s += normal_[i] * x[i];
  return s;
}

Hyperplane Hyperplane::negated() const {
  std::vector<double> n(normal_);
  for (double& v : n) v = -v;
  return Hyperplane(std::move(n), -offset_);
}

RegionLabel::RegionLabel(std::size_t k, std::uint64_t bits) : k_(k), bits_(bits) {
  if (k > kMaxComparators) throw std::invalid_argument("region label longer than " + std::to_string(kMaxComparators));
  if (k < 64 && (bits >> k) != 0) throw std::invalid_argument("region label has bits beyond its length");
}

RegionLabel::RegionLabel(std::span<const int> signs) : k_(signs.size()) {
  if (k_ > kMaxComparators) throw std::invalid_argument("region label longer than " + std::to_string(kMaxComparators));
  for (std::size_t j = 0; j < k_; ++j) {
    if (signs[j] == 1) {
      bits_ |= std::uint64_t{1} << j;
    } else if (signs[j] != -1) {
      throw std::invalid_argument("region label entries must be -1 or +1");
    }
  }
}

std::vector<int> RegionLabel::signs() const {
  std::vector<int> s(k_);
  for (std::size_t j = 0; j < k_; ++j) s[j] = (*this)[j];
  return s;
}

std::strong_ordering RegionLabel::operator<=>(const RegionLabel& other) const {
  const std::size_t common = std::min(k_, other.k_);
  const std::uint64_t diff = (bits_ ^ other.bits_) & (common == 64 ? ~0ull : ((std::uint64_t{1} << common) - 1));
  if (diff != 0) {
    const int j = std::countr_zero(diff);
    return ((bits_ >> j) & 1u) ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return k_ <=> other.k_;
}

CombinerConfig::CombinerConfig(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("combiner dimension must be >= 1");
}

CombinerConfig::CombinerConfig(std::size_t dim, const std::vector<Hyperplane>& planes) : CombinerConfig(dim) {
  if (planes.size() > kMaxComparators)
    throw std::invalid_argument("at most " + std::to_string(kMaxComparators) + " comparators are supported");
  weights_.reserve(planes.size() * dim);
  offsets_.reserve(planes.size());
  for (const auto& p : planes) {
    if (p.dim() != dim) throw std::invalid_argument("hyperplane dimension does not match combiner dimension");
    weights_.insert(weights_.end(), p.normal().begin(), p.normal().end());
    offsets_.push_back(p.offset());
  }
}

Hyperplane CombinerConfig::hyperplane(std::size_t j) const {
  auto n = normal(j);
  return Hyperplane(std::vector<double>(n.begin(), n.end()), offsets_.at(j));
}

CombinerConfig CombinerConfig::with_hyperplane(std::size_t j, const Hyperplane& plane) const {
  if (plane.dim() != dim_) throw std::invalid_argument("hyperplane dimension does not match combiner dimension");
  CombinerConfig out(*this);
  std::copy(plane.normal().begin(), plane.normal().end(), out.weights_.begin() + j * dim_);
  out.offsets_.at(j) = plane.offset();
  return out;
}

CombinerConfig CombinerConfig::negated(std::size_t j) const {
  return with_hyperplane(j, hyperplane(j).negated());
}

std::uint64_t region_count_upper_bound(std::uint64_t m, std::uint64_t n) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t top = std::min(m, n);
  unsigned __int128 total = 0;
  unsigned __int128 binom = 1;  // C(n, i); stays below 2^64 so the product below fits in 128 bits
  for (std::uint64_t i = 0; i <= top; ++i) {
    if (i > 0) binom = binom * (n - i + 1) / i;
    total += binom;
    if (binom > kMax || total > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(total);
}

std::uint64_t sign_bits(const CombinerConfig& config, std::span<const double> x) {
  const std::size_t d = config.dim();
  const double* w = config.weights().data();
  const double* t = config.offsets().data();
  std::uint64_t bits = 0;
  for (std::size_t j = 0; j < config.size(); ++j) {
    double s = t[j];
    for (std::size_t i = 0; i < d; ++i) s += w[j * d + i] * x[i];
    bits |= static_cast<std::uint64_t>(s >= 0.0) << j;
  }
  return bits;
}

RegionLabel sign_vector(const CombinerConfig& config, std::span<const double> x) {
  if (x.size() != config.dim())
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) + ", expected " +
                                std::to_string(config.dim()));
  return RegionLabel(config.size(), sign_bits(config, x));
}

namespace {

// Calls visit(subset) for every size-r subset of {0..n-1}, in lexicographic order;
// stops early when visit returns false.
template <typename Visit>
bool for_each_subset(std::size_t n, std::size_t r, Visit&& visit) {
  if (r > n) return true;
  std::vector<std::size_t> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    if (!visit(std::span<const std::size_t>(idx))) return false;
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == n - r + i - 1) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

bool is_general_position(const CombinerConfig& config) {
  const std::size_t d = config.dim();
  const std::size_t k = config.size();
  if (k == 0) return true;
  const std::size_t r = std::min(k, d);

  auto rows = [&](std::span<const std::size_t> subset) {
    Eigen::MatrixXd a(subset.size(), d);
    for (std::size_t i = 0; i < subset.size(); ++i)
      for (std::size_t c = 0; c < d; ++c) a(i, c) = config.normal(subset[i])[c];
    return a;
  };

  const bool independent = for_each_subset(k, r, [&](std::span<const std::size_t> subset) {
    const Eigen::MatrixXd a = rows(subset);
    // For r < d the Gram determinant is the squared volume spanned by the rows.
    const double vol = (r == d) ? std::abs(a.determinant()) : std::sqrt(std::max(0.0, (a * a.transpose()).determinant()));
    return vol > kGeneralPositionTol;
  });
  if (!independent) return false;
  if (k <= d) return true;

  return for_each_subset(k, d + 1, [&](std::span<const std::size_t> subset) {
    const Eigen::MatrixXd a = rows(subset.first(d));
    Eigen::VectorXd b(d);
    for (std::size_t i = 0; i < d; ++i) b(i) = -config.offset(subset[i]);
    const Eigen::VectorXd x = a.partialPivLu().solve(b);
    const std::size_t last = subset[d];
    double residual = config.offset(last);
    for (std::size_t c = 0; c < d; ++c) residual += config.normal(last)[c] * x(c);
    return std::abs(residual) > kGeneralPositionTol;
  });
}

std::set<RegionLabel> enumerate_regions_sampled(const CombinerConfig& config, const SourceModel& source,
                                                std::size_t n_samples, RngStream& rng) {
  if (source.dim() != config.dim()) throw std::invalid_argument("source and combiner dimensions differ");
  std::set<RegionLabel> out;
  constexpr std::size_t kBatch = 1 << 16;
  std::vector<std::uint64_t> codes;
  for (std::size_t done = 0; done < n_samples; done += kBatch) {
    const std::size_t n = std::min(kBatch, n_samples - done);
    const SampleSet batch = draw_samples(source, rng, n);
    codes.resize(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) codes[i] = sign_bits(config, batch.point(i));
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    for (std::uint64_t c : codes) out.emplace(config.size(), c);
  }
  return out;
}

SeparationMatrix::SeparationMatrix(std::size_t size) : size_(size), entries_(size < 2 ? 0 : size * (size - 1) / 2, 0) {}

std::size_t SeparationMatrix::index(std::size_t i, std::size_t j) const {
  if (!(i > j && i < size_)) throw std::out_of_range("separation matrix entries exist only for i > j");
  return i * (i - 1) / 2 + j;
}

int SeparationMatrix::at(std::size_t i, std::size_t j) const { return entries_[index(i, j)]; }

void SeparationMatrix::set(std::size_t i, std::size_t j, int value) { entries_[index(i, j)] = value; }

SeparationMatrix separation_matrix(std::span<const RegionLabel> labels) {
  SeparationMatrix m(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].size() != labels[0].size()) throw std::invalid_argument("labels have different lengths");
    for (std::size_t j = 0; j < i; ++j) {
      const std::uint64_t diff = labels[i].bits() ^ labels[j].bits();
      if (diff == 0) throw std::invalid_argument("duplicate region label at positions " + std::to_string(j) + " and " +
                                                 std::to_string(i));
      if (std::popcount(diff) == 1) m.set(i, j, std::countr_zero(diff) + 1);
    }
  }
  return m;
}

}  // namespace cmplq
