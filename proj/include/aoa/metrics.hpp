#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aoa/estimators.hpp"
#include "aoa/postprocess.hpp"
#include "aoa/raster.hpp"
#include "aoa/scenario.hpp"

namespace aoa::metrics {

struct MatchPair {
  int truth = 0;
  int estimate = 0;
  double distance = 0.0;          // meters
  double squared_distance = 0.0;  // m^2, computed directly (not distance^2)
};

struct MatchResult {
  std::vector<MatchPair> pairs;  // sorted by truth index
  std::vector<int> unmatched_truth;
  std::vector<int> unmatched_estimates;

  /// Sum of squared pair distances, accumulated in truth-index order.
  double total_cost() const;
};

/// Minimum total squared distance assignment (Hungarian method) on
/// min(S, S_hat) pairs.
MatchResult match_estimates(std::span<const WorldPoint> truth, std::span<const WorldPoint> estimates);
MatchResult match_estimates(const sim::SourceSet& truth, std::span<const est::SourceEstimate> estimates);

struct RunRecord {
  std::uint64_t scenario_id = 0;
  double sigma_deg = 0.0;
  int S = 1;
  int S_hat = 0;
  std::vector<double> squared_errors;  // one per matched pair, m^2
  bool failed = false;
  std::string failure;

  /// Matches `estimates` against `truth` and stores the pair errors.
  static RunRecord from_estimates(std::uint64_t id, double sigma_deg, const sim::SourceSet& truth,
                                  std::span<const est::SourceEstimate> estimates);
};

/// sqrt(mean of all matched squared errors) over successful runs; nullopt
/// when there are no matched pairs.
std::optional<double> localization_rmse(std::span<const RunRecord> runs);

/// sqrt(mean (S - S_hat)^2) over successful runs; nullopt when none.
std::optional<double> count_rmse(std::span<const RunRecord> runs);

struct CellReport {
  double sigma_deg = 0.0;
  int S = 1;
  int M = 0;  // requested runs
  int failures = 0;
  std::optional<double> loc_rmse_m;
  std::optional<double> count_rmse;
};

struct MetricsReport {
  std::string method;
  std::uint64_t master_seed = 0;
  std::vector<CellReport> cells;
  int total_runs = 0;
  int total_failures = 0;
  std::optional<double> loc_rmse_m;  // pooled over every run
  std::optional<double> count_rmse;

  std::string to_json() const;
  /// sigma_deg,S,M,loc_rmse_m,count_rmse,failures; absent metrics are empty.
  std::string to_csv() const;
};

/// Builds a report from (sigma, S) cells of run records; cell order follows
/// first appearance in `runs`.
MetricsReport summarize(std::span<const RunRecord> runs, const std::string& method, std::uint64_t master_seed);

/// Produces estimates for one scenario. Classical pipelines read only
/// scenario.measurements; diagnostic pipelines may use ground truth.
using Pipeline = std::function<std::vector<est::SourceEstimate>(const sim::Scenario&, std::uint64_t run_seed)>;

struct PipelineOptions {
  est::PlsOptions pls;
  est::WiveOptions wive;
  est::PsoConfig pso;  // bounds are replaced by the scenario region
  bool wive_region_guard = true;  // sets wive.bounds to the scenario region
};

Pipeline estimator_pipeline(est::Method method, const PipelineOptions& opts = {});

/// Renders the ground-truth label and decodes it: exercises the
/// raster -> postprocess chain with a perfect segmenter.
Pipeline label_oracle_pipeline(double resolution_m = 250.0, int dot_radius_px = 0,
                               const post::DecodeOptions& decode = {});

struct MonteCarloConfig {
  std::vector<double> sigmas_deg{0.5, 1.0, 1.5, 2.0, 2.5};
  std::vector<int> source_counts{1, 2, 3, 4, 5};
  int runs = 100;
  std::uint64_t master_seed = 0;
  sim::ScenarioConfig base;  // sigma, S and seed are overwritten per run
  int threads = 1;
};

/// Seed of run `run` in cell `cell`.
std::uint64_t run_seed(std::uint64_t master, std::size_t cell, std::size_t run);

std::vector<RunRecord> monte_carlo_runs(const MonteCarloConfig& cfg, const Pipeline& pipeline);
MetricsReport monte_carlo(const MonteCarloConfig& cfg, const Pipeline& pipeline, const std::string& method);

struct TimingRow {
  std::string method;
  double mean_ms = 0.0;
  double std_ms = 0.0;
  int reps = 0;
};

struct BenchmarkConfig {
  sim::ScenarioConfig scenario;  // seed is replaced per repetition
  int repetitions = 100;
  std::uint64_t master_seed = 0;
  PipelineOptions estimators;
  double resolution_m = 250.0;
  raster::RenderOptions render;
};

/// Mean wall time per method (pls, wive, pso-ml) plus a "preprocessing" row
/// for render_input, every method timed on the same scenario each repetition.
std::vector<TimingRow> benchmark_timings(const std::vector<est::Method>& methods, const BenchmarkConfig& cfg);

std::string timings_to_csv(std::span<const TimingRow> rows);
std::string timings_to_json(std::span<const TimingRow> rows);

}  // namespace aoa::metrics
