#include "cmplq/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

#include "cmplq/kernels.hpp"

namespace cmplq {

namespace {

constexpr std::size_t kQuadratureNodes = 1 << 15;

std::size_t subintervals_per_cell(std::size_t cells) {
  std::size_t m = kQuadratureNodes / cells;
  m = std::max<std::size_t>(m, 64);
  return m + (m % 2);
}

// Composite Simpson of f(x) * pdf(x) over [a, b] clipped to the support.
template <typename F>
double integrate(const SourceModel& marginal, double a, double b, std::size_t m, F&& f) {
  const auto [lo, hi] = marginal.marginal_support();
  a = std::max(a, lo);
  b = std::min(b, hi);
  if (!(b > a)) return 0.0;
  const double h = (b - a) / static_cast<double>(m);
  auto g = [&](double x) { return f(x) * marginal.marginal_pdf(x); };
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i < m; ++i) {
    const double x = a + h * static_cast<double>(i);
    (i % 2 ? odd : even) += g(x);
  }
  return h / 3.0 * (g(a) + 4.0 * odd + 2.0 * even + g(b));
}

std::vector<double> cell_edges(const ScalarQuantizer& q) {
  std::vector<double> edges;
  edges.reserve(q.thresholds.size() + 2);
  edges.push_back(-std::numeric_limits<double>::infinity());
  edges.insert(edges.end(), q.thresholds.begin(), q.thresholds.end());
  edges.push_back(std::numeric_limits<double>::infinity());
  return edges;
}

std::vector<double> midpoints(const std::vector<double>& levels) {
  std::vector<double> t(levels.size() - 1);
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) t[i] = 0.5 * (levels[i] + levels[i + 1]);
  return t;
}

// Thresholds at the i/n quantiles of the marginal, by bisection on the
// quadrature CDF.
std::vector<double> quantile_thresholds(SourceKind kind, std::size_t n_levels) {
  const SourceModel marginal(kind, 1);
  const auto [lo, hi] = marginal.marginal_support();
  std::vector<double> t;
  for (std::size_t i = 1; i < n_levels; ++i) {
    const double target = static_cast<double>(i) / static_cast<double>(n_levels);
    double a = lo, b = hi;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (a + b);
      if (cell_moments(kind, lo, mid, 4096).mass < target) {
        a = mid;
      } else {
        b = mid;
      }
    }
    t.push_back(0.5 * (a + b));
  }
  return t;
}

}  // namespace

CellMoments cell_moments(SourceKind kind, double a, double b, std::size_t subintervals) {
  const SourceModel marginal(kind, 1);
  const std::size_t m = subintervals + (subintervals % 2);
  return {integrate(marginal, a, b, m, [](double) { return 1.0; }),
          integrate(marginal, a, b, m, [](double x) { return x; })};
}

ScalarQuantizer lloyd_max_scalar(SourceKind kind, std::size_t n_levels, std::size_t max_iter, double tol) {
  if (n_levels == 0) throw std::invalid_argument("lloyd_max_scalar needs at least one level");
  const std::size_t m = subintervals_per_cell(n_levels);
  ScalarQuantizer q;
  q.thresholds = quantile_thresholds(kind, n_levels);
  q.levels.assign(n_levels, 0.0);

  for (std::size_t it = 1; it <= std::max<std::size_t>(max_iter, 1); ++it) {
    const auto edges = cell_edges(q);
    double change = 0.0;
    for (std::size_t i = 0; i < n_levels; ++i) {
      const CellMoments cm = cell_moments(kind, edges[i], edges[i + 1], m);
      // An empty cell keeps its previous level.
      const double level = cm.mass > 0.0 ? cm.first / cm.mass : q.levels[i];
      if (it > 1) change = std::max(change, std::abs(level - q.levels[i]));
      q.levels[i] = level;
    }
    q.thresholds = midpoints(q.levels);
    q.iterations = it;
    if (it > 1 && change < tol) {
      q.converged = true;
      break;
    }
  }
  return q;
}

double scalar_mse(const ScalarQuantizer& q, SourceKind kind) {
  const SourceModel marginal(kind, 1);
  const auto edges = cell_edges(q);
  const std::size_t m = subintervals_per_cell(q.levels.size());
  double total = 0.0;
  for (std::size_t i = 0; i < q.levels.size(); ++i) {
    const double c = q.levels[i];
    total += integrate(marginal, edges[i], edges[i + 1], m, [c](double x) { return (x - c) * (x - c); });
  }
  return total;
}

VectorCodebook::VectorCodebook(std::size_t dim, std::vector<double> points) : dim_(dim), points_(std::move(points)) {
  if (dim_ == 0 || points_.empty() || points_.size() % dim_ != 0)
    throw std::invalid_argument("vector codebook needs at least one point of the right dimension");
  const std::size_t n = size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < a; ++b) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) d2 += (points_[a * dim_ + j] - points_[b * dim_ + j]) * (points_[a * dim_ + j] - points_[b * dim_ + j]);
      if (std::sqrt(d2) <= 1e-9) throw std::invalid_argument("vector codebook has duplicate points");
    }
}

namespace {

// One k-means++ seeding followed by Lloyd iterations on `train`.
GeneralizedLloydResult lloyd_from_seeding(const SampleSet& train, std::size_t n_points, std::size_t max_iter,
                                          RngStream& rng) {
  const std::size_t d = train.dim();
  const std::size_t n = train.size();
  std::vector<double> points;
  points.reserve(n_points * d);
  auto append = [&](std::size_t i) {
    const auto x = train.point(i);
    points.insert(points.end(), x.begin(), x.end());
  };
  append(rng.below(n));
  std::vector<std::int32_t> assignment(n, 0);
  std::vector<double> dist2(n);
  while (points.size() < n_points * d) {
    kernels::nearest_points(points, train, assignment, dist2);
    double total = 0.0;
    for (double v : dist2) total += v;
    std::size_t pick = n - 1;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        u -= dist2[i];
        if (u < 0.0) {
          pick = i;
          break;
        }
      }
    }
    append(pick);
  }

  GeneralizedLloydResult out{VectorCodebook(d, points), {}, false};
  std::vector<std::int32_t> previous;
  std::vector<double> sums(n_points * d);
  std::vector<std::size_t> counts(n_points);
  for (std::size_t it = 0; it < max_iter; ++it) {
    kernels::nearest_points(points, train, assignment, dist2);
    double total = 0.0;
    for (double v : dist2) total += v;
    out.distortion.push_back(total / static_cast<double>(n));
    if (assignment == previous) {
      out.converged = true;
      break;
    }
    previous = assignment;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = train.point(i);
      for (std::size_t j = 0; j < d; ++j) sums[assignment[i] * d + j] += x[j];
      ++counts[assignment[i]];
    }
    for (std::size_t p = 0; p < n_points; ++p) {
      if (counts[p] > 0) {
        for (std::size_t j = 0; j < d; ++j) points[p * d + j] = sums[p * d + j] / static_cast<double>(counts[p]);
      } else {
        const auto far = static_cast<std::size_t>(std::max_element(dist2.begin(), dist2.end()) - dist2.begin());
        const auto x = train.point(far);
        std::copy(x.begin(), x.end(), points.begin() + p * d);
        dist2[far] = 0.0;
        previous.clear();
      }
    }
  }
  out.codebook = VectorCodebook(d, points);
  return out;
}

}  // namespace

GeneralizedLloydResult generalized_lloyd_vector(const SourceModel& source, std::size_t n_points, std::size_t samples,
                                                std::size_t max_iter, RngStream& rng, std::size_t inits) {
  if (n_points == 0) throw std::invalid_argument("generalized Lloyd needs at least one point");
  if (samples < 100 * n_points) throw std::invalid_argument("generalized Lloyd needs at least 100 samples per point");
  if (inits == 0) throw std::invalid_argument("generalized Lloyd needs at least one initialization");
  const SampleSet train = draw_samples(source, rng, samples);
  std::optional<GeneralizedLloydResult> best;
  for (std::size_t i = 0; i < inits; ++i) {
    auto run = lloyd_from_seeding(train, n_points, max_iter, rng);
    if (!best || run.distortion.back() < best->distortion.back()) best = std::move(run);
  }
  return std::move(*best);
}

ComparatorBaseline matched_comparator_baseline(const SourceModel& source, std::size_t k) {
  const std::size_t d = source.dim();
  std::map<std::size_t, ScalarQuantizer> scalar;
  std::map<std::size_t, double> mse;
  auto quantizer = [&](std::size_t thresholds) -> const ScalarQuantizer& {
    auto it = scalar.find(thresholds);
    if (it == scalar.end()) {
      it = scalar.emplace(thresholds, lloyd_max_scalar(source.kind(), thresholds + 1)).first;
      mse[thresholds] = scalar_mse(it->second, source.kind());
    }
    return it->second;
  };

  std::vector<std::size_t> best_split;
  double best_mse = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> split(d, 0);
  // Weak compositions of k into d parts, visited in lexicographic order so
  // that a later equal-MSE split is the lexicographically larger one.
  auto visit = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
    if (pos + 1 == d) {
      split[pos] = remaining;
      double total = 0.0;
      for (std::size_t part : split) {
        quantizer(part);
        total += mse[part];
      }
      if (total <= best_mse + 1e-12 * std::abs(best_mse)) {
        best_mse = std::min(best_mse, total);
        best_split = split;
      }
      return;
    }
    for (std::size_t part = 0; part <= remaining; ++part) {
      split[pos] = part;
      self(self, pos + 1, remaining - part);
    }
  };
  visit(visit, 0, k);

  // Product grid, last coordinate fastest.
  std::vector<std::vector<double>> axes;
  std::size_t count = 1;
  for (std::size_t part : best_split) {
    axes.push_back(quantizer(part).levels);
    count *= axes.back().size();
  }
  std::vector<double> points;
  points.reserve(count * d);
  std::vector<std::size_t> digit(d, 0);
  for (std::size_t p = 0; p < count; ++p) {
    for (std::size_t j = 0; j < d; ++j) points.push_back(axes[j][digit[j]]);
    for (std::size_t j = d; j-- > 0;) {
      if (++digit[j] < axes[j].size()) break;
      digit[j] = 0;
    }
  }
  return {VectorCodebook(d, std::move(points)), best_split, best_mse};
}

MseEstimate evaluate_codebook_mse(const VectorCodebook& codebook, const SampleSet& samples) {
  if (samples.dim() != codebook.dim()) throw std::invalid_argument("codebook and sample dimensions differ");
  return to_mse_estimate(kernels::nearest_errors(codebook.points(), samples));
}

MseEstimate evaluate_codebook_mse(const VectorCodebook& codebook, const SourceModel& source,
                                  const EstimationParams& params, RngStream& rng) {
  const SampleSet samples = draw_samples(source, rng, params.n_points_mse);
  return evaluate_codebook_mse(codebook, samples);
}

}  // namespace cmplq
