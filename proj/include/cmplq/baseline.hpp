#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cmplq/estimation.hpp"
#include "cmplq/quantizer.hpp"
#include "cmplq/rng.hpp"
#include "cmplq/source.hpp"

namespace cmplq {

/// Scalar quantizer: cell i is [thresholds[i-1], thresholds[i]) and maps to levels[i].
struct ScalarQuantizer {
  std::vector<double> thresholds;
  std::vector<double> levels;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Moments of the marginal over [a, b], by composite Simpson on the part of
/// [a, b] inside the marginal support.
struct CellMoments {
  double mass = 0.0;
  double first = 0.0;
};
CellMoments cell_moments(SourceKind marginal, double a, double b, std::size_t subintervals);

/// Lloyd-Max design for the marginal of `marginal`, integrating cells by
/// quadrature. Starts from the marginal quantiles; stops when no level moves
/// by more than tol or after max_iter rounds. Returned thresholds are the
/// midpoints of the returned levels.
ScalarQuantizer lloyd_max_scalar(SourceKind marginal, std::size_t n_levels, std::size_t max_iter = 10000,
                                 double tol = 1e-9);

/// E[(X - Q(X))^2] for one coordinate, by quadrature.
double scalar_mse(const ScalarQuantizer& quantizer, SourceKind marginal);

/// Reconstruction points for nearest-neighbour quantization.
class VectorCodebook {
 public:
  /// `points` is row-major; requires at least one point and no two closer than 1e-9.
  VectorCodebook(std::size_t dim, std::vector<double> points);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return points_.size() / dim_; }
  std::span<const double> point(std::size_t i) const { return {points_.data() + i * dim_, dim_}; }
  const std::vector<double>& points() const { return points_; }

 private:
  std::size_t dim_;
  std::vector<double> points_;
};

struct GeneralizedLloydResult {
  VectorCodebook codebook;
  /// Mean squared error on the training set at each assignment step.
  std::vector<double> distortion;
  bool converged = false;
};

/// Initializations used by the experiment harness and the CLI.
inline constexpr std::size_t kDefaultLloydInits = 10;

/// k-means on a fixed Monte Carlo training set of `samples` draws, seeded by
/// k-means++. Empty cells are re-seeded from the farthest training points.
/// With inits > 1 the seeding and iterations repeat on the same training set
/// and the run with the lowest final distortion is returned.
GeneralizedLloydResult generalized_lloyd_vector(const SourceModel& source, std::size_t n_points, std::size_t samples,
                                                std::size_t max_iter, RngStream& rng, std::size_t inits = 1);

struct ComparatorBaseline {
  VectorCodebook codebook;
  /// Thresholds spent on each coordinate.
  std::vector<std::size_t> split;
  /// Sum of per-coordinate Lloyd-Max MSEs.
  double analytic_mse;
};

/// Best axis-aligned product of scalar Lloyd-Max quantizers that uses k
/// thresholds in total. Ties go to the lexicographically largest split.
ComparatorBaseline matched_comparator_baseline(const SourceModel& source, std::size_t k);

MseEstimate evaluate_codebook_mse(const VectorCodebook& codebook, const SampleSet& samples);
MseEstimate evaluate_codebook_mse(const VectorCodebook& codebook, const SourceModel& source,
                                  const EstimationParams& params, RngStream& rng);

}  // namespace cmplq
