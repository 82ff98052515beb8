// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   acceptance <path to cmplq binary> <scratch directory> [criterion ids...]
//
// With no ids every criterion runs.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cmplq/baseline.hpp"
#include "cmplq/estimation.hpp"
#include "cmplq/experiments.hpp"
#include "cmplq/geometry.hpp"
#include "cmplq/optimizer.hpp"

using namespace cmplq;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;
std::set<int> selected;

bool wanted(int id) { return selected.empty() || selected.contains(id); }

void report(int id, const std::string& name, const Outcome& o) {
  std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << "  " << name << "  " << o.detail << std::endl;
  if (!o.pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Composite Simpson of f on [a, b] with m (even) subintervals.
double simpson(const std::function<double(double)>& f, double a, double b, int m) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// 1: region counts -----------------------------------------------------------

// Closest point to the origin on the flat where the planes in `subset` all vanish.
Eigen::VectorXd flat_point(const CombinerConfig& cfg, const std::vector<std::size_t>& subset) {
  const auto d = static_cast<Eigen::Index>(cfg.dim());
  const auto m = static_cast<Eigen::Index>(subset.size());
  Eigen::MatrixXd v(m, d);
  Eigen::VectorXd t(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) v(r, c) = cfg.normal(subset[r])[c];
    t(r) = cfg.offset(subset[r]);
  }
  return -v.transpose() * (v * v.transpose()).ldlt().solve(t);
}

void subsets(std::size_t n, std::size_t r, std::size_t start, std::vector<std::size_t>& cur,
             const std::function<void(const std::vector<std::size_t>&)>& visit) {
  if (cur.size() == r) {
    visit(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, r, i + 1, cur, visit);
    cur.pop_back();
  }
}

// A random general-position arrangement rescaled so its farthest crossing sits
// at radius 1.5 in the source bulk, with crossings spread apart so every cell
// has visible mass. Crossings move linearly with the offsets, which makes the
// rescaling exact.
CombinerConfig bulk_arrangement(std::size_t d, std::size_t k, RngStream& rng, std::size_t& draws) {
  const SourceModel source(SourceKind::gaussian, d);
  constexpr double kRadius = 1.5, kSpread = 0.12;
  for (draws = 1;; ++draws) {
    const CombinerConfig cfg = random_configuration(d, k, source, rng);
    if (!is_general_position(cfg)) continue;
    std::vector<Eigen::VectorXd> points;
    std::vector<std::size_t> cur;
    subsets(k, std::min(k, d), 0, cur, [&](const std::vector<std::size_t>& s) { points.push_back(flat_point(cfg, s)); });
    double far = 0.0, near = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < points.size(); ++a) {
      far = std::max(far, points[a].norm());
      for (std::size_t b = 0; b < a; ++b) near = std::min(near, (points[a] - points[b]).norm());
    }
    if (!(far > 0.0)) continue;
    if (points.size() > 1 && near < kSpread * far) continue;
    std::vector<Hyperplane> planes;
    for (std::size_t j = 0; j < k; ++j) {
      const auto n = cfg.normal(j);
      planes.emplace_back(std::vector<double>(n.begin(), n.end()), cfg.offset(j) * kRadius / far);
    }
    return CombinerConfig(d, planes);
  }
}

Outcome criterion_region_counts() {
  const auto start = Clock::now();
  RngStream rng(2024, 1);
  std::ostringstream bad;
  std::size_t checked = 0, max_draws = 0;
  for (std::size_t d = 1; d <= 3; ++d)
    for (std::size_t k = 1; k <= 6; ++k) {
      std::size_t draws = 0;
      const CombinerConfig cfg = bulk_arrangement(d, k, rng, draws);
      max_draws = std::max(max_draws, draws);
      const auto regions = enumerate_regions_sampled(cfg, SourceModel(SourceKind::gaussian, d), 1000000, rng);
      const auto bound = region_count_upper_bound(d, k);
      ++checked;
      if (regions.size() != bound) bad << " (d=" << d << ",k=" << k << ": " << regions.size() << " vs " << bound << ")";
    }
  const double secs = seconds_since(start);
  const bool pass = bad.str().empty() && secs < 60.0;
  return {pass, fmt("%zu arrangements (up to %zu draws each), sampled counts %s the bound, %.1f s (limit 60 s)%s",
                    checked, max_draws, bad.str().empty() ? "all equal" : "differ from", secs, bad.str().c_str())};
}

// 2: 1-D optima ---------------------------------------------------------------

Outcome criterion_scalar_optima() {
  // Oracles: E|X| by quadrature gives 1 - (E|X|)^2; the uniform three-cell split
  // integrates (x - c)^2 over each third.
  const double abs_mean = 2.0 * simpson([](double x) { return x * normal_pdf(x); }, 0.0, 12.0, 20000);
  const double gaussian_oracle = 1.0 - abs_mean * abs_mean;
  double uniform_oracle = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double c = (2 * i + 1) / 6.0;
    uniform_oracle += simpson([c](double x) { return (x - c) * (x - c); }, i / 3.0, (i + 1) / 3.0, 200);
  }

  auto t0 = Clock::now();
  const auto g = optimize(SourceModel(SourceKind::gaussian, 1), 1, OptimizerParams{}, RngStream(1, 0));
  const double g_secs = seconds_since(t0);
  const double threshold = -g.design.config().offset(0) / g.design.config().normal(0)[0];
  const bool g_ok = std::abs(g.design.mse().value - gaussian_oracle) <= 0.01 && std::abs(threshold) <= 0.05 &&
                    g_secs < 120.0;

  t0 = Clock::now();
  const auto u = optimize(SourceModel(SourceKind::uniform, 1), 2, OptimizerParams{}, RngStream(1, 0));
  const double u_secs = seconds_since(t0);
  const bool u_ok = std::abs(u.design.mse().value - uniform_oracle) <= 0.002 && u_secs < 120.0;

  return {g_ok && u_ok,
          fmt("gaussian k=1: mse %.5f (oracle %.5f), threshold %+.4f, %.1f s; uniform k=2: mse %.6f (oracle %.6f), "
              "%.1f s",
              g.design.mse().value, gaussian_oracle, threshold, g_secs, u.design.mse().value, uniform_oracle, u_secs)};
}

// 3, 4, 5: sweeps at d=2 ---------------------------------------------------------

struct Sweep {
  ExperimentResult result;
  double seconds;
};

Sweep run_sweep(SourceKind kind, const fs::path& out) {
  ExperimentSpec spec;
  spec.source = kind;
  spec.dim = 2;
  spec.k_list = {2, 3, 4, 5};
  spec.seed = 1;
  spec.output_dir = out;
  const auto start = Clock::now();
  ExperimentResult result = run_experiment(spec, &std::cerr);
  return {std::move(result), seconds_since(start)};
}

Outcome criterion_ratio(const Sweep& sweep, double lo, double hi) {
  const auto& rec = sweep.result.records.back();
  const bool pass = rec.ratio >= lo && rec.ratio <= hi && sweep.seconds < 1800.0;
  return {pass, fmt("k=5 ratio %.4f (target [%.2f, %.2f]); ours %.6f +- %.6f, matched comparators %.6f (split %zu,%zu); "
                    "sweep k=2..5 took %.0f s (limit 1800 s)",
                    rec.ratio, lo, hi, rec.ours.value, rec.ours.std_error, rec.lloyd_comparators.value,
                    rec.comparator_split[0], rec.comparator_split[1], sweep.seconds)};
}

Outcome criterion_ordering(const Sweep& gaussian, const Sweep& uniform) {
  bool pass = true;
  std::ostringstream detail;
  for (const Sweep* s : {&gaussian, &uniform}) {
    detail << to_string(s->result.spec.source) << ":";
    for (const auto& rec : s->result.records) {
      const double lower = std::hypot(rec.lloyd_points.std_error, rec.ours.std_error);
      const double upper = std::hypot(rec.ours.std_error, rec.lloyd_comparators.std_error);
      const bool ok = rec.lloyd_points.value <= rec.ours.value + 3.0 * lower &&
                      rec.ours.value <= rec.lloyd_comparators.value + 3.0 * upper;
      pass = pass && ok;
      detail << fmt(" k=%zu %.5f<=%.5f<=%.5f%s", rec.k, rec.lloyd_points.value, rec.ours.value,
                    rec.lloyd_comparators.value, ok ? "" : "(violated)");
    }
    detail << ";";
  }
  return {pass, detail.str()};
}

// 6: monotone traces -------------------------------------------------------------

Outcome criterion_monotone_traces() {
  std::mt19937_64 gen(606);
  std::size_t violations = 0, records = 0;
  for (int tuple = 0; tuple < 50; ++tuple) {
    const SourceKind kind = gen() % 2 ? SourceKind::uniform : SourceKind::gaussian;
    const std::size_t d = 1 + gen() % 3, k = 1 + gen() % 5;
    OptimizerParams p;
    p.total_iterations = 60;
    p.estimation.n_points_centroids = 10000;
    p.estimation.n_points_mse = 10000;
    const auto r = optimize(SourceModel(kind, d), k, p, RngStream(gen(), static_cast<std::uint64_t>(tuple)));
    double prev = r.trace.initial_mse;
    for (const auto& rec : r.trace.records) {
      ++records;
      if (rec.accepted_mse > prev) ++violations;
      prev = rec.accepted_mse;
    }
  }
  return {violations == 0, fmt("50 random tuples, %zu trace records, %zu increases", records, violations)};
}

// 7: estimator consistency ---------------------------------------------------------

Outcome criterion_consistency() {
  const SourceModel source(SourceKind::gaussian, 1);
  const double c = std::sqrt(2.0 / std::numbers::pi);
  const CombinerConfig cfg(1, {Hyperplane({1.0}, 0.0)});
  const std::vector<int> neg{-1}, pos{1};
  const Codebook cb(1, 1, {{RegionLabel(neg), {-c}, 0.5}, {RegionLabel(pos), {c}, 0.5}}, {0.0});
  const QuantizerDesign design(cfg, cb, source, MseEstimate{});

  RngStream rng(77, 7);
  std::vector<MseEstimate> est;
  for (std::size_t n : {1000u, 10000u, 100000u, 1000000u}) {
    EstimationParams p;
    p.n_points_mse = n;
    est.push_back(estimate_mse(design, source, p, rng));
  }
  bool pass = true;
  std::ostringstream detail;
  for (std::size_t i = 0; i < est.size(); ++i) {
    detail << fmt("n=%zu mse %.5f se %.2e", est[i].n_points, est[i].value, est[i].std_error);
    if (i > 0) {
      const double ratio = est[i].std_error / est[i - 1].std_error;
      pass = pass && ratio >= 0.25 && ratio <= 0.40;
      detail << fmt(" (ratio %.3f)", ratio);
    }
    detail << "; ";
  }
  return {pass, detail.str()};
}

// 8: CLI determinism ---------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_cli_determinism(const fs::path& cli, const fs::path& work) {
  const std::string args =
      " sweep --source uniform --dim 2 --k 1..3 --seed 9 --iterations 40 --restarts 2 --points-centroids 20000"
      " --points-mse 20000 --out ";
  std::vector<fs::path> dirs{work / "sweep_a", work / "sweep_b"};
  for (const auto& dir : dirs) {
    fs::remove_all(dir);
    const std::string cmd = "\"" + cli.string() + "\"" + args + "\"" + dir.string() + "\" > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "cmplq sweep exited with an error: " + cmd};
  }
  const std::string csv = slurp(dirs[0] / "results.csv"), json = slurp(dirs[0] / "results.json");
  const bool pass = !csv.empty() && !json.empty() && csv == slurp(dirs[1] / "results.csv") &&
                    json == slurp(dirs[1] / "results.json");
  return {pass, fmt("results.csv (%zu bytes) and results.json (%zu bytes) %s across two runs", csv.size(), json.size(),
                    pass ? "identical" : "differ")};
}

// 9: scalar Lloyd fixed point --------------------------------------------------------

Outcome criterion_scalar_lloyd() {
  double worst_mid = 0.0, worst_uniform = 0.0;
  for (SourceKind kind : {SourceKind::gaussian, SourceKind::uniform})
    for (std::size_t n = 1; n <= 16; ++n) {
      const auto q = lloyd_max_scalar(kind, n);
      for (std::size_t i = 0; i + 1 < n; ++i)
        worst_mid = std::max(worst_mid, std::abs(q.thresholds[i] - 0.5 * (q.levels[i] + q.levels[i + 1])));
      if (kind == SourceKind::uniform)
        worst_uniform = std::max(worst_uniform, std::abs(scalar_mse(q, kind) - 1.0 / (12.0 * double(n * n))));
    }
  return {worst_mid <= 1e-8 && worst_uniform <= 1e-9,
          fmt("max midpoint residual %.1e (limit 1e-8), max uniform mse error %.1e (limit 1e-9)", worst_mid,
              worst_uniform)};
}

// 10: local minima diagnostic ----------------------------------------------------------

Outcome criterion_local_minima() {
  OptimizerParams p;
  p.restarts = 10;
  const auto r = multi_restart(SourceModel(SourceKind::gaussian, 2), 3, p, RngStream(1, 0));
  std::set<std::size_t> counts;
  std::ostringstream detail;
  detail << "restart regions/mse:";
  for (const auto& run : r.restarts) {
    counts.insert(run.design.occupied_regions());
    detail << fmt(" %zu/%.4f", run.design.occupied_regions(), run.design.mse().value);
  }
  detail << fmt("; %zu distinct region counts", counts.size());
  return {counts.size() >= 2, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <cmplq binary> <scratch directory> [criterion ids...]\n";
    return 2;
  }
  for (int i = 3; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  const fs::path cli = argv[1], work = argv[2];
  fs::create_directories(work);

  if (wanted(1)) report(1, "region count matches the bound", criterion_region_counts());
  if (wanted(2)) report(2, "one-dimensional optima", criterion_scalar_optima());

  if (wanted(3) || wanted(4) || wanted(5)) {
    const Sweep gaussian = run_sweep(SourceKind::gaussian, work / "gaussian_d2");
    const Sweep uniform = run_sweep(SourceKind::uniform, work / "uniform_d2");
    if (wanted(3)) report(3, "gaussian k=5 ratio", criterion_ratio(gaussian, 0.5, 0.8));
    if (wanted(4)) report(4, "uniform k=5 ratio", criterion_ratio(uniform, 0.6, 0.85));
    if (wanted(5)) report(5, "baseline ordering k=2..5", criterion_ordering(gaussian, uniform));
  }

  if (wanted(6)) report(6, "monotone traces", criterion_monotone_traces());
  if (wanted(7)) report(7, "estimator consistency", criterion_consistency());
  if (wanted(8)) report(8, "cli sweep determinism", criterion_cli_determinism(cli, work));
  if (wanted(9)) report(9, "scalar Lloyd fixed point", criterion_scalar_lloyd());
  if (wanted(10)) report(10, "local minima diagnostic", criterion_local_minima());

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
