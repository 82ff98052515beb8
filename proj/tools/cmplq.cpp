// cmplq: design and benchmark comparison-limited vector quantizers.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cmplq/baseline.hpp"
#include "cmplq/design_io.hpp"
#include "cmplq/estimation.hpp"
#include "cmplq/experiments.hpp"
#include "cmplq/geometry.hpp"
#include "cmplq/optimizer.hpp"

namespace {

using namespace cmplq;

std::size_t parse_count(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("bad comparator count '" + s + "'");
  return v;
}

// "3", "1..6" or "1,2,5"
std::vector<std::size_t> parse_k_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const std::size_t dots = item.find("..");
    if (dots != std::string::npos) {
      const std::size_t lo = parse_count(item.substr(0, dots));
      const std::size_t hi = parse_count(item.substr(dots + 2));
      if (hi < lo) throw std::invalid_argument("empty comparator range '" + item + "'");
      for (std::size_t k = lo; k <= hi; ++k) out.push_back(k);
    } else {
      out.push_back(parse_count(item));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

struct CommonFlags {
  std::string source = "gaussian";
  std::size_t dim = 2;
  std::uint64_t seed = 0;
  std::string config;
  OptimizerParams optimizer;
};

void add_source_flags(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--source", f.source, "Source distribution")->check(CLI::IsMember({"gaussian", "uniform"}));
  sub->add_option("--dim", f.dim, "Quantizer dimension d")->check(CLI::PositiveNumber);
  sub->add_option("--seed", f.seed, "Master seed");
  sub->add_option("--config", f.config, "JSON file with flag values (command-line flags win)");
}

void add_estimation_flags(CLI::App* sub, EstimationParams& p) {
  sub->add_option("--points-centroids", p.n_points_centroids, "Monte Carlo points per centroid pass");
  sub->add_option("--points-mse", p.n_points_mse, "Monte Carlo points for MSE estimates");
  sub->add_option("--min-region-points", p.min_points_per_region, "Points per region before top-up passes stop");
}

void add_optimizer_flags(CLI::App* sub, OptimizerParams& p) {
  sub->add_option("--iterations", p.total_iterations, "Search iterations per restart");
  sub->add_option("--candidates", p.candidates_per_iteration, "Candidate configurations per iteration");
  sub->add_option("--restarts", p.restarts, "Independent random restarts");
  sub->add_option("--initial-step", p.initial_step, "Initial perturbation scale");
  sub->add_option("--step-decay", p.step_decay, "Per-iteration decay of the perturbation scale");
  add_estimation_flags(sub, p.estimation);
}

// Fills options not given on the command line from a JSON object whose keys
// are long flag names without the leading dashes.
void apply_config_file(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  const nlohmann::json j = nlohmann::json::parse(in);
  if (!j.is_object()) throw std::runtime_error("config file " + path + " must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw std::runtime_error("config file " + path + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (const auto& v : value) text += (text.empty() ? "" : ",") + v.dump();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else {
      text = value.dump();
    }
    opt->add_result(text);
    opt->run_callback();
  }
}

void print_mse(const std::string& name, const MseEstimate& m, std::size_t dim) {
  std::cout << name << ": mse=" << m.value << " std_error=" << m.std_error
            << " per_coordinate=" << per_coordinate_mse(m, dim) << " n=" << m.n_points << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Comparison-limited vector quantizer design and benchmarking"};
  app.require_subcommand(1);
  std::cout.precision(9);

  CommonFlags design_flags;
  std::size_t design_k = 1;
  std::string design_out;
  auto* design = app.add_subcommand("design", "Design a quantizer for one comparator budget");
  add_source_flags(design, design_flags);
  add_optimizer_flags(design, design_flags.optimizer);
  design->add_option("--comparators", design_k, "Number of comparators k");
  design->add_option("--out", design_out, "Write the design JSON here");

  CommonFlags sweep_flags;
  std::string sweep_k = "1..6";
  std::string sweep_out;
  bool sweep_timestamp = false;
  auto* sweep = app.add_subcommand("sweep", "Sweep comparator budgets against the Lloyd baselines");
  add_source_flags(sweep, sweep_flags);
  add_optimizer_flags(sweep, sweep_flags.optimizer);
  sweep->add_option("--k", sweep_k, "Comparator counts: N, A..B or a comma list");
  sweep->add_option("--out", sweep_out, "Output directory")->required();
  sweep->add_flag("--timestamp", sweep_timestamp, "Record the wall-clock time in results.json");

  std::string eval_design;
  std::uint64_t eval_seed = 0;
  std::string eval_config;
  EstimationParams eval_params;
  auto* eval = app.add_subcommand("eval", "Estimate the MSE of a saved design");
  eval->add_option("--design", eval_design, "Design JSON file")->required();
  eval->add_option("--points-mse", eval_params.n_points_mse, "Monte Carlo points");
  eval->add_option("--seed", eval_seed, "Seed of the evaluation stream");
  eval->add_option("--config", eval_config, "JSON file with flag values (command-line flags win)");

  CommonFlags base_flags;
  std::size_t base_k = 1;
  std::string base_kind = "both";
  std::size_t base_points = 0;
  auto* baseline = app.add_subcommand("baseline", "Evaluate the Lloyd-Max baselines");
  add_source_flags(baseline, base_flags);
  add_estimation_flags(baseline, base_flags.optimizer.estimation);
  baseline->add_option("--comparators", base_k, "Comparator budget k");
  baseline->add_option("--baseline", base_kind, "Which baseline")->check(CLI::IsMember({"points", "comparators", "both"}));
  baseline->add_option("--points", base_points, "Reconstruction points for the matched-points baseline (default r(d,k))");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*design) {
      apply_config_file(design, design_flags.config);
      const SourceModel source(parse_source_kind(design_flags.source), design_flags.dim);
      const auto result = multi_restart(source, design_k, design_flags.optimizer, design_stream(design_flags.seed, design_k));
      const auto& d = result.design;
      std::cout << "k=" << design_k << " regions=" << d.occupied_regions() << '\n';
      print_mse("design", d.mse(), d.dim());
      for (const auto& r : result.restarts)
        std::cout << "restart " << r.restart << ": mse=" << r.design.mse().value
                  << " regions=" << r.design.occupied_regions() << '\n';
      if (!design_out.empty()) save_design(d, design_out);
    } else if (*sweep) {
      apply_config_file(sweep, sweep_flags.config);
      ExperimentSpec spec;
      spec.source = parse_source_kind(sweep_flags.source);
      spec.dim = sweep_flags.dim;
      spec.k_list = parse_k_list(sweep_k);
      spec.optimizer = sweep_flags.optimizer;
      spec.seed = sweep_flags.seed;
      spec.output_dir = sweep_out;
      spec.timestamp = sweep_timestamp;
      run_experiment(spec, &std::cerr);
      std::cout << "wrote " << (spec.output_dir / "results.csv").string() << '\n';
    } else if (*eval) {
      apply_config_file(eval, eval_config);
      const QuantizerDesign d = load_design(eval_design);
      RngStream rng(eval_seed, 0);
      print_mse("eval", estimate_mse(d, d.source(), eval_params, rng), d.dim());
    } else if (*baseline) {
      apply_config_file(baseline, base_flags.config);
      const SourceModel source(parse_source_kind(base_flags.source), base_flags.dim);
      const auto& est = base_flags.optimizer.estimation;
      if (base_kind != "points") {
        const auto b = matched_comparator_baseline(source, base_k);
        RngStream rng = evaluation_stream(base_flags.seed, base_k);
        std::cout << "comparators: split=";
        for (std::size_t i = 0; i < b.split.size(); ++i) std::cout << (i ? "," : "") << b.split[i];
        std::cout << " points=" << b.codebook.size() << " analytic_mse=" << b.analytic_mse << '\n';
        print_mse("comparators", evaluate_codebook_mse(b.codebook, source, est, rng), source.dim());
      }
      if (base_kind != "comparators") {
        const std::size_t n = base_points > 0 ? base_points
                                              : static_cast<std::size_t>(region_count_upper_bound(source.dim(), base_k));
        RngStream train = lloyd_stream(base_flags.seed, base_k);
        const auto g = generalized_lloyd_vector(source, n, std::max(100 * n, est.n_points_centroids), 300, train,
                                                kDefaultLloydInits);
        RngStream rng = evaluation_stream(base_flags.seed, base_k);
        std::cout << "points: n=" << n << " converged=" << (g.converged ? "yes" : "no") << '\n';
        print_mse("points", evaluate_codebook_mse(g.codebook, source, est, rng), source.dim());
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "cmplq: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
