#include "cmplq/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace cmplq {

namespace {

constexpr std::uint64_t kControlStream = 11;
constexpr std::uint64_t kSearchBankStream = 12;
constexpr std::uint64_t kFinalBankStream = 13;
constexpr std::uint64_t kRestartStream = 14;
constexpr std::size_t kFinalPointsFactor = 4;

std::vector<double> gaussian_vector(std::size_t d, RngStream& rng) {
  std::vector<double> v(d);
  for (double& x : v) x = rng.normal();
  return v;
}

// Signed offset of `pivot` from the plane (normal, offset); zero pivot when empty.
double pivot_distance(std::span<const double> normal, double offset, std::span<const double> pivot) {
  double s = offset;
  for (std::size_t i = 0; i < pivot.size(); ++i) s += normal[i] * pivot[i];
  return s;
}

// Hyperplane with normal direction `raw` (any scale) placed at signed distance
// `distance` from `pivot`.
Hyperplane around_pivot(std::vector<double> raw, double distance, std::span<const double> pivot) {
  double norm2 = 0.0;
  for (double x : raw) norm2 += x * x;
  const double norm = std::sqrt(norm2);
  for (double& x : raw) x /= norm;
  const double offset = distance - pivot_distance(raw, 0.0, pivot);
  return Hyperplane(std::move(raw), offset);
}

}  // namespace

double OptimizerParams::step_at(std::size_t iteration) const {
  return initial_step * std::pow(step_decay, static_cast<double>(iteration));
}

double OptimizerParams::global_probability(std::size_t iteration) const {
  return std::exp(-global_prob_decay * static_cast<double>(iteration));
}

void OptimizerParams::validate() const {
  if (total_iterations == 0) throw std::invalid_argument("iterations must be positive");
  if (candidates_per_iteration == 0) throw std::invalid_argument("candidates must be positive");
  if (!(global_prob_decay > 0.0)) throw std::invalid_argument("global_prob_decay must be positive");
  if (!(initial_step > 0.0)) throw std::invalid_argument("initial step must be positive");
  if (!(step_decay > 0.0 && step_decay < 1.0)) throw std::invalid_argument("step decay must lie in (0, 1)");
  if (restarts == 0) throw std::invalid_argument("restarts must be positive");
  if (estimation.n_points_centroids == 0 || estimation.n_points_mse == 0)
    throw std::invalid_argument("estimation point counts must be positive");
}

CombinerConfig random_configuration(std::size_t dim, std::size_t k, const SourceModel& source, RngStream& rng) {
  if (dim != source.dim()) throw std::invalid_argument("dimension differs from the source dimension");
  std::vector<Hyperplane> planes;
  planes.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> normal;
    double norm2 = 0.0;
    while (!(norm2 > 0.0)) {
      normal = gaussian_vector(dim, rng);
      norm2 = 0.0;
      for (double x : normal) norm2 += x * x;
    }
    const double norm = std::sqrt(norm2);
    for (double& x : normal) x /= norm;
    double offset = 0.0;
    if (source.kind() == SourceKind::gaussian) {
      offset = rng.normal();
    } else {
      for (std::size_t i = 0; i < dim; ++i) offset -= normal[i] * rng.uniform();
    }
    planes.emplace_back(std::move(normal), offset);
  }
  return CombinerConfig(dim, planes);
}

std::vector<CombinerConfig> global_update(const CombinerConfig& config, std::size_t iteration,
                                          const OptimizerParams& params, RngStream& rng,
                                          std::span<const double> pivot) {
  const double step = params.step_at(iteration);
  const std::size_t d = config.dim();
  std::vector<CombinerConfig> out;
  out.reserve(params.candidates_per_iteration);
  for (std::size_t c = 0; c < params.candidates_per_iteration; ++c) {
    std::vector<Hyperplane> planes;
    planes.reserve(config.size());
    for (std::size_t j = 0; j < config.size(); ++j) {
      const auto n = config.normal(j);
      std::vector<double> raw(d);
      double norm2 = 0.0;
      do {
        for (std::size_t i = 0; i < d; ++i) raw[i] = n[i] + step * rng.normal();
        norm2 = 0.0;
        for (double x : raw) norm2 += x * x;
      } while (!(norm2 > 0.0));
      const double distance = pivot_distance(n, config.offset(j), pivot) + step * rng.normal();
      planes.push_back(around_pivot(std::move(raw), distance, pivot));
    }
    out.emplace_back(d, planes);
  }
  return out;
}

std::vector<CombinerConfig> local_update(const CombinerConfig& config, std::size_t iteration,
                                         const OptimizerParams& params, RngStream& rng,
                                         std::span<const double> pivot) {
  if (config.size() == 0) throw std::invalid_argument("local update needs at least one hyperplane");
  const double step = params.step_at(iteration);
  const std::size_t d = config.dim();
  const std::size_t count = params.candidates_per_iteration;
  const std::size_t plane = rng.below(config.size());
  const std::size_t variable = rng.below(d + 1);
  const auto normal = config.normal(plane);
  const double offset = config.offset(plane);
  const double distance = pivot_distance(normal, offset, pivot);

  std::vector<CombinerConfig> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    if (variable == d) {
      const double frac = count == 1 ? 0.5 : static_cast<double>(c) / static_cast<double>(count - 1);
      const double t = offset + step * (4.0 * frac - 2.0);
      out.push_back(config.with_hyperplane(plane, Hyperplane({normal.begin(), normal.end()}, t)));
    } else {
      std::vector<double> raw(normal.begin(), normal.end());
      double norm2 = 0.0;
      do {
        raw[variable] = normal[variable] + step * rng.normal();
        norm2 = 0.0;
        for (double x : raw) norm2 += x * x;
      } while (!(norm2 > 0.0));
      out.push_back(config.with_hyperplane(plane, around_pivot(std::move(raw), distance, pivot)));
    }
  }
  return out;
}

OptimizeResult optimize(const SourceModel& source, std::size_t k, const OptimizerParams& params, RngStream rng) {
  params.validate();
  const std::size_t d = source.dim();
  RngStream control = rng.substream(kControlStream);
  SampleBank bank(source, params.estimation, rng.substream(kSearchBankStream));

  const std::vector<double> pivot = source.mean_vector();
  CombinerConfig config = random_configuration(d, k, source, control);
  Codebook codebook = estimate_centroids(config, bank);
  MseEstimate mse = estimate_mse(config, codebook, bank.mse_samples());

  OptimizationTrace trace;
  trace.initial_mse = mse.value;
  if (k > 0) {
    trace.records.reserve(params.total_iterations);
    for (std::size_t i = 1; i <= params.total_iterations; ++i) {
      const bool global = control.uniform() < params.global_probability(i);
      const auto candidates =
          global ? global_update(config, i, params, control, pivot) : local_update(config, i, params, control, pivot);
      for (const auto& candidate : candidates) {
        Codebook cb = estimate_centroids(candidate, bank);
        const MseEstimate m = estimate_mse(candidate, cb, bank.mse_samples());
        if (m.value < mse.value) {
          config = candidate;
          codebook = std::move(cb);
          mse = m;
        }
      }
      trace.records.push_back({i, mse.value, global ? UpdateKind::global : UpdateKind::local, codebook.size()});
    }
  }

  SampleBank final_bank(source, params.estimation.scaled(kFinalPointsFactor), rng.substream(kFinalBankStream));
  Codebook final_codebook = estimate_centroids(config, final_bank);
  const MseEstimate final_mse = estimate_mse(config, final_codebook, final_bank.mse_samples());
  Provenance provenance{rng.seed(), rng.stream_id(), params.total_iterations, 1};
  return {QuantizerDesign(std::move(config), std::move(final_codebook), source, final_mse, provenance),
          std::move(trace)};
}

MultiRestartResult multi_restart(const SourceModel& source, std::size_t k, const OptimizerParams& params,
                                 RngStream rng) {
  params.validate();
  std::vector<RestartResult> runs;
  runs.reserve(params.restarts);
  std::size_t best = 0;
  for (std::size_t r = 0; r < params.restarts; ++r) {
    const RngStream stream = r == 0 ? rng : rng.substream(kRestartStream, r);
    auto result = optimize(source, k, params, stream);
    runs.push_back({r, std::move(result.design), std::move(result.trace)});
    if (runs[r].design.mse().value < runs[best].design.mse().value) best = r;
  }
  const QuantizerDesign& winner = runs[best].design;
  QuantizerDesign design(winner.config(), winner.codebook(), winner.source(), winner.mse(),
                         Provenance{rng.seed(), rng.stream_id(), params.total_iterations, params.restarts});
  return {std::move(design), best, std::move(runs)};
}

}  // namespace cmplq
