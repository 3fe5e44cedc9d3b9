// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "aoa/metrics.hpp"
#include "aoa/parallel.hpp"
#include "aoa/postprocess.hpp"
#include "aoa/raster.hpp"
#include "aoa/rng.hpp"
#include "aoa/scenario.hpp"
#include "../support.hpp"

namespace {

using namespace aoa;

// Fixed before any run; never tuned against outcomes.
constexpr std::uint64_t kMasterSeed = 20241016;

constexpr double kNoiselessSigmaDeg = 1e-9;
constexpr double kClosedFormTolM = 1e-3;
constexpr double kPsoOracleTolM = 100.0;
constexpr double kNoiselessBudgetS = 60.0;
constexpr double kOrderingSlack = 0.05;
constexpr double kOrderingBudgetS = 15.0 * 60.0;
constexpr int kRuns = 100;
constexpr int kGridPoints = 100000;
constexpr int kLabelScenarios = 100;
constexpr double kMinSeparationM = 1000.0;
constexpr int kCcaMasks = 1000;
constexpr int kAssignmentInstances = 200;
constexpr double kArithmeticRelTol = 1e-9;
constexpr int kTimingReps = 100;
constexpr int kDeterminismRuns = 10;
const double kHalfDiagonal = 250.0 * std::sqrt(2.0) / 2.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++g_failures;
  std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

sim::ScenarioConfig table_shape() {
  sim::ScenarioConfig c;
  c.period_s = 3.0;
  c.duration_s = 300.0;
  return c;
}

Outcome noiseless_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_pls = 0.0, worst_wive = 0.0, worst_pso = 0.0;
  for (int k = 0; k < 50; ++k) {
    sim::ScenarioConfig c;
    c.sigma_deg = kNoiselessSigmaDeg;
    c.seed = derive_seed(kMasterSeed, stream_tag("noiseless"), static_cast<std::uint64_t>(k));
    const auto s = sim::simulate_scenario(c);
    const WorldPoint truth = s.sources.locations[0];
    worst_pls = std::max(worst_pls, distance(est::pls_estimate(s.measurements).position, truth));
    worst_wive = std::max(worst_wive, distance(est::wive_estimate(s.measurements).position, truth));
    est::PsoConfig pc;
    pc.bounds = c.region;
    pc.seed = derive_seed(c.seed, stream_tag("pso"));
    const WorldPoint pso = est::pso_ml_estimate(s.measurements, pc).position;
    const WorldPoint oracle = testing::grid_search_ml(s.measurements, c.region);
    worst_pso = std::max(worst_pso, distance(pso, oracle));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = worst_pls <= kClosedFormTolM && worst_wive <= kClosedFormTolM && worst_pso <= kPsoOracleTolM &&
                    secs < kNoiselessBudgetS;
  return {pass, fmt("max |PLS-truth| %.3g m, max |WIVE-truth| %.3g m, max |PSO-oracle| %.3g m, %.1f s", worst_pls,
                    worst_wive, worst_pso, secs)};
}

double single_cell_rmse(double sigma, const metrics::Pipeline& p, std::uint64_t seed) {
  metrics::MonteCarloConfig cfg;
  cfg.sigmas_deg = {sigma};
  cfg.source_counts = {1};
  cfg.runs = kRuns;
  cfg.master_seed = seed;
  cfg.base = table_shape();
  cfg.threads = default_thread_count();
  const auto r = metrics::monte_carlo(cfg, p, "cell");
  return r.loc_rmse_m.value_or(std::numeric_limits<double>::infinity());
}

Outcome estimator_ordering() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  const auto pls = metrics::estimator_pipeline(est::Method::kPls);
  const auto wive = metrics::estimator_pipeline(est::Method::kWive);
  const auto pso = metrics::estimator_pipeline(est::Method::kPsoMl);
  for (double sigma : {0.5, 1.0, 1.5, 2.0, 2.5}) {
    const std::uint64_t seed = derive_seed(kMasterSeed, stream_tag("ordering"));
    const double a = single_cell_rmse(sigma, pso, seed);
    const double b = single_cell_rmse(sigma, wive, seed);
    const double c = single_cell_rmse(sigma, pls, seed);
    const bool ok = a <= b * (1.0 + kOrderingSlack) && b <= c * (1.0 + kOrderingSlack);
    pass = pass && ok;
    detail += fmt("s=%.1f pso %.0f wive %.0f pls %.0f; ", sigma, a, b, c);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  pass = pass && secs < kOrderingBudgetS;
  return {pass, detail + fmt("%.1f s", secs)};
}

Outcome wive_weight_direction() {
  const std::uint64_t seed = derive_seed(kMasterSeed, stream_tag("weights"));
  const double pls = single_cell_rmse(2.0, metrics::estimator_pipeline(est::Method::kPls), seed);
  const double wive = single_cell_rmse(2.0, metrics::estimator_pipeline(est::Method::kWive), seed);
  metrics::PipelineOptions lit;
  lit.wive.weighting = est::WiveWeighting::kLiteral;
  const double literal = single_cell_rmse(2.0, metrics::estimator_pipeline(est::Method::kWive, lit), seed);
  return {wive < pls, fmt("wive %.1f m < pls %.1f m (literal weighting, diagnostic: %.1f m)", wive, pls, literal)};
}

Outcome grid_round_trip() {
  const raster::GridSpec g;
  std::mt19937_64 rng(derive_seed(kMasterSeed, stream_tag("grid")));
  std::uniform_real_distribution<double> ux(g.region.x_min, g.region.x_max);
  std::uniform_real_distribution<double> uy(g.region.y_min, g.region.y_max);
  int failures = 0;
  double worst = 0.0;
  for (int i = 0; i < kGridPoints; ++i) {
    const WorldPoint p{ux(rng), uy(rng)};
    const double d = distance(raster::pixel_to_world(raster::world_to_pixel(p, g), g), p);
    worst = std::max(worst, d);
    failures += d > kHalfDiagonal;
  }
  return {failures == 0, fmt("%.0f points, worst %.4f m, bound %.4f m, failures %.0f", kGridPoints, worst,
                             kHalfDiagonal, failures)};
}

Outcome label_round_trip() {
  const raster::GridSpec g;
  int failures = 0;
  double worst = 0.0;
  for (int k = 0; k < kLabelScenarios; ++k) {
    sim::ScenarioConfig c;
    c.num_sources = 1 + k % 5;
    sim::Scenario s;
    // Redraw until the sources are separated; the draw sequence is seeded.
    for (std::uint64_t attempt = 0;; ++attempt) {
      c.seed = derive_seed(kMasterSeed, stream_tag("label"), static_cast<std::uint64_t>(k) * 1000 + attempt);
      s = sim::simulate_scenario(c);
      if (testing::min_separation(s.sources.locations) > kMinSeparationM) break;
    }
    post::ProbabilityMap p;
    p.grid = g;
    p.values = raster::Image<double>(g.width, g.height, 0.0);
    const auto label = raster::render_label(s.sources, g);
    for (std::size_t i = 0; i < label.data.size(); ++i) p.values.data[i] = label.data[i];
    const auto est = post::decode(p);
    bool ok = static_cast<int>(est.size()) == c.num_sources;
    for (const auto& pair : metrics::match_estimates(s.sources, est).pairs) {
      worst = std::max(worst, pair.distance);
      ok = ok && pair.distance <= kHalfDiagonal;
    }
    failures += !ok;
  }
  return {failures == 0, fmt("%.0f scenarios, worst matched distance %.2f m, failures %.0f", kLabelScenarios, worst,
                             failures)};
}

Outcome cca_oracle() {
  std::mt19937_64 rng(derive_seed(kMasterSeed, stream_tag("cca")));
  std::uniform_real_distribution<double> density(0.05, 0.8);
  int failures = 0;
  for (int i = 0; i < kCcaMasks; ++i) {
    std::bernoulli_distribution on(density(rng));
    post::Mask m(64, 64, 0);
    for (auto& v : m.data) v = on(rng) ? 1 : 0;
    for (bool eight : {false, true}) {
      const auto cs = post::connected_components(m, eight ? post::Connectivity::kEight : post::Connectivity::kFour);
      testing::Partition got;
      for (const auto& comp : cs.components) got.push_back(comp.pixels);
      failures += got != testing::flood_fill_partition(m, eight);
    }
  }
  return {failures == 0, fmt("%.0f masks x 2 connectivities, mismatches %.0f", kCcaMasks, failures)};
}

Outcome assignment_oracle() {
  std::mt19937_64 rng(derive_seed(kMasterSeed, stream_tag("assignment")));
  std::uniform_int_distribution<int> count(0, 5);
  std::uniform_real_distribution<double> coord(-100000.0, 100000.0);
  int failures = 0;
  for (int i = 0; i < kAssignmentInstances; ++i) {
    std::vector<WorldPoint> truth(static_cast<std::size_t>(count(rng)));
    std::vector<WorldPoint> est(static_cast<std::size_t>(count(rng)));
    for (auto& p : truth) p = {coord(rng), coord(rng)};
    for (auto& p : est) p = {coord(rng), coord(rng)};
    failures += metrics::match_estimates(truth, est).total_cost() != testing::brute_force_assignment_cost(truth, est);
  }
  return {failures == 0, fmt("%.0f instances, exact mismatches %.0f", kAssignmentInstances, failures)};
}

bool rel_close(std::optional<double> got, double want) {
  return got && std::abs(*got - want) <= kArithmeticRelTol * std::abs(want);
}

Outcome metrics_arithmetic() {
  metrics::RunRecord a, b;
  a.squared_errors = {0.0};
  b.squared_errors = {200.0 * 200.0};
  const std::vector<metrics::RunRecord> pooled{a, b};
  const auto loc = metrics::localization_rmse(pooled);

  metrics::RunRecord c, d;
  c.S = 3;
  c.S_hat = 3;
  d.S = 3;
  d.S_hat = 5;
  const std::vector<metrics::RunRecord> counts{c, d};
  const auto cnt = metrics::count_rmse(counts);
  const std::vector<metrics::RunRecord> one{d};
  const auto two = metrics::count_rmse(one);

  const bool pass = rel_close(loc, std::sqrt(20000.0)) && rel_close(cnt, std::sqrt(2.0)) && rel_close(two, 2.0);
  return {pass, fmt("pooled %.10g (want 141.4213562), count %.10g (want 1.414213562), single %.10g (want 2)",
                    loc.value_or(NAN), cnt.value_or(NAN), two.value_or(NAN))};
}

Outcome timing_ordering() {
  metrics::BenchmarkConfig cfg;
  cfg.scenario = table_shape();
  cfg.repetitions = kTimingReps;
  cfg.master_seed = derive_seed(kMasterSeed, stream_tag("timing"));
  const auto rows =
      metrics::benchmark_timings({est::Method::kPls, est::Method::kWive, est::Method::kPsoMl}, cfg);
  double pls = 0, wive = 0, pso = 0;
  for (const auto& r : rows) {
    if (r.method == "pls") pls = r.mean_ms;
    if (r.method == "wive") wive = r.mean_ms;
    if (r.method == "pso-ml") pso = r.mean_ms;
  }
  return {pls < wive && wive < pso,
          fmt("%.0f reps: pls %.4f ms < wive %.4f ms < pso-ml %.3f ms", kTimingReps, pls, wive, pso)};
}

Outcome determinism() {
  std::string detail;
  bool pass = true;
  const std::vector<std::pair<std::string, metrics::Pipeline>> methods{
      {"label-oracle", metrics::label_oracle_pipeline()},
      {"wive", metrics::estimator_pipeline(est::Method::kWive)},
      {"pso-ml", metrics::estimator_pipeline(est::Method::kPsoMl)},
  };
  for (const auto& [name, pipeline] : methods) {
    metrics::MonteCarloConfig cfg;
    cfg.runs = kDeterminismRuns;
    cfg.master_seed = kMasterSeed;
    cfg.threads = 1;
    const auto one = metrics::monte_carlo(cfg, pipeline, name);
    cfg.threads = 8;
    const auto eight = metrics::monte_carlo(cfg, pipeline, name);
    const bool same = one.to_json() == eight.to_json() && one.to_csv() == eight.to_csv();
    pass = pass && same;
    detail += name + (same ? " identical; " : " DIFFERS; ");
  }
  return {pass, detail + "25 cells x 10 runs, 1 vs 8 threads"};
}

}  // namespace

int main() {
  std::printf("master seed %llu\n", static_cast<unsigned long long>(kMasterSeed));
  report("noiseless-consistency", noiseless_consistency);
  report("estimator-ordering", estimator_ordering);
  report("wive-weight-direction", wive_weight_direction);
  report("grid-round-trip", grid_round_trip);
  report("label-round-trip", label_round_trip);
  report("cca-oracle", cca_oracle);
  report("assignment-oracle", assignment_oracle);
  report("metrics-arithmetic", metrics_arithmetic);
  report("timing-ordering", timing_ordering);
  report("determinism", determinism);
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
