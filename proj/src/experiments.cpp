#include "cmplq/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "cmplq/design_io.hpp"
#include "cmplq/estimation.hpp"

namespace cmplq {

using nlohmann::json;

namespace {

constexpr std::uint64_t kDesignTag = 101;
constexpr std::uint64_t kEvalTag = 102;
constexpr std::uint64_t kLloydTag = 103;
constexpr std::size_t kEvalPointsFactor = 4;
constexpr std::size_t kLloydMaxIter = 300;

std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

json mse_json(const MseEstimate& m) { return {{"value", m.value}, {"std_error", m.std_error}, {"n_points", m.n_points}}; }

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
  if (k_list.empty()) throw std::invalid_argument("comparator list is empty");
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    if (k_list[i] < 1) throw std::invalid_argument("comparator counts must be >= 1");
    if (k_list[i] > kMaxComparators) throw std::invalid_argument("comparator count exceeds " + std::to_string(kMaxComparators));
    if (i > 0 && k_list[i] <= k_list[i - 1]) throw std::invalid_argument("comparator counts must be strictly ascending");
  }
  optimizer.validate();
}

RngStream design_stream(std::uint64_t seed, std::size_t k) { return RngStream(seed, 0).substream(kDesignTag, k); }
RngStream evaluation_stream(std::uint64_t seed, std::size_t k) { return RngStream(seed, 0).substream(kEvalTag, k); }
RngStream lloyd_stream(std::uint64_t seed, std::size_t k) { return RngStream(seed, 0).substream(kLloydTag, k); }

json params_to_json(const OptimizerParams& p) {
  return {{"iterations", p.total_iterations},
          {"candidates", p.candidates_per_iteration},
          {"global_prob_decay", p.global_prob_decay},
          {"initial_step", p.initial_step},
          {"step_decay", p.step_decay},
          {"restarts", p.restarts},
          {"points_centroids", p.estimation.n_points_centroids},
          {"points_mse", p.estimation.n_points_mse},
          {"min_region_points", p.estimation.min_points_per_region},
          {"max_topup_rounds", p.estimation.max_topup_rounds}};
}

std::uint64_t params_hash(const OptimizerParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : params_to_json(params).dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void ensure_writable_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".cmplq_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw std::runtime_error("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

ExperimentResult run_experiment(const ExperimentSpec& spec, std::ostream* log) {
  spec.validate();
  if (!spec.output_dir.empty()) ensure_writable_directory(spec.output_dir);

  const SourceModel source(spec.source, spec.dim);
  ExperimentResult result{spec, {}, {}, params_hash(spec.optimizer), spec.timestamp ? utc_now() : std::string()};
  const EstimationParams eval_params = spec.optimizer.estimation.scaled(kEvalPointsFactor);

  for (std::size_t k : spec.k_list) {
    if (log) *log << "k=" << k << ": designing (" << spec.optimizer.restarts << " restarts)" << std::endl;
    MultiRestartResult designed = multi_restart(source, k, spec.optimizer, design_stream(spec.seed, k));

    ExperimentRecord rec;
    rec.k = k;
    rec.regions = designed.design.occupied_regions();
    for (const auto& run : designed.restarts)
      rec.restarts.push_back({run.restart, run.design.mse(), run.design.occupied_regions()});

    RngStream lloyd_rng = lloyd_stream(spec.seed, k);
    const std::size_t training = std::max(100 * rec.regions, spec.optimizer.estimation.n_points_centroids);
    const auto matched_points =
        generalized_lloyd_vector(source, rec.regions, training, kLloydMaxIter, lloyd_rng, kDefaultLloydInits);
    const auto matched_comparators = matched_comparator_baseline(source, k);
    rec.comparator_split = matched_comparators.split;
    rec.lloyd_comparators_analytic = matched_comparators.analytic_mse;

    RngStream eval_rng = evaluation_stream(spec.seed, k);
    const SampleSet eval = draw_samples(source, eval_rng, eval_params.n_points_mse);
    rec.ours = estimate_mse(designed.design.config(), designed.design.codebook(), eval);
    rec.lloyd_points = evaluate_codebook_mse(matched_points.codebook, eval);
    rec.lloyd_comparators = evaluate_codebook_mse(matched_comparators.codebook, eval);
    rec.ratio = rec.ours.value / rec.lloyd_comparators.value;
    if (log)
      *log << "k=" << k << ": mse_ours=" << rec.ours.value << " regions=" << rec.regions
           << " lloyd_points=" << rec.lloyd_points.value << " lloyd_comparators=" << rec.lloyd_comparators.value
           << " ratio=" << rec.ratio << std::endl;

    result.records.push_back(std::move(rec));
    result.designs.push_back(std::move(designed.design));
  }

  if (!spec.output_dir.empty()) {
    emit_csv(result, spec.output_dir / "results.csv");
    emit_json(result, spec.output_dir / "results.json");
    for (const auto& design : result.designs)
      save_design(design, spec.output_dir / ("design_k" + std::to_string(design.comparators()) + ".json"));
  }
  return result;
}

void emit_csv(const ExperimentResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write CSV file " + path.string());
  out << "k,mse_ours,stderr_ours,regions,mse_lloyd_points,mse_lloyd_comparators,ratio\n";
  for (const auto& r : result.records) {
    out << r.k << ',' << format_g9(r.ours.value) << ',' << format_g9(r.ours.std_error) << ',' << r.regions << ','
        << format_g9(r.lloyd_points.value) << ',' << format_g9(r.lloyd_comparators.value) << ',' << format_g9(r.ratio)
        << '\n';
  }
  if (!out) throw std::runtime_error("failed writing CSV file " + path.string());
}

void emit_json(const ExperimentResult& result, const std::filesystem::path& path) {
  json records = json::array();
  for (const auto& r : result.records) {
    json restarts = json::array();
    for (const auto& s : r.restarts)
      restarts.push_back({{"restart", s.restart}, {"mse", mse_json(s.mse)}, {"regions", s.regions}});
    records.push_back({{"k", r.k},
                       {"regions", r.regions},
                       {"mse_ours", mse_json(r.ours)},
                       {"mse_lloyd_points", mse_json(r.lloyd_points)},
                       {"mse_lloyd_comparators", mse_json(r.lloyd_comparators)},
                       {"mse_lloyd_comparators_analytic", r.lloyd_comparators_analytic},
                       {"comparator_split", r.comparator_split},
                       {"ratio", r.ratio},
                       {"restarts", std::move(restarts)}});
  }
  json j{{"source", std::string(to_string(result.spec.source))},
         {"dim", result.spec.dim},
         {"k_list", result.spec.k_list},
         {"seed", result.spec.seed},
         {"params", params_to_json(result.spec.optimizer)},
         {"params_hash", result.params_hash},
         {"records", std::move(records)}};
  if (!result.timestamp.empty()) j["timestamp"] = result.timestamp;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write JSON file " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing JSON file " + path.string());
}

}  // namespace cmplq
