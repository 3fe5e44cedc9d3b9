#include "aoa/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "aoa/parallel.hpp"
#include "aoa/rng.hpp"
#include "json.hpp"

namespace aoa::metrics {

double MatchResult::total_cost() const {
  double sum = 0.0;
  for (const auto& p : pairs) sum += p.squared_distance;
  return sum;
}

namespace {

// Rows <= cols. Returns the column assigned to each row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = n == 0 ? 0 : static_cast<int>(cost[0].size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

std::string fmt(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

// Keeps timed results observable so the calls are not optimized away.
volatile double g_sink = 0.0;

// Sorted summation makes the pooled metrics independent of run order.
double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

}  // namespace

MatchResult match_estimates(std::span<const WorldPoint> truth, std::span<const WorldPoint> estimates) {
  MatchResult out;
  const std::size_t s = truth.size();
  const std::size_t e = estimates.size();
  if (s == 0 || e == 0) {
    for (std::size_t i = 0; i < s; ++i) out.unmatched_truth.push_back(static_cast<int>(i));
    for (std::size_t j = 0; j < e; ++j) out.unmatched_estimates.push_back(static_cast<int>(j));
    return out;
  }
  const bool transpose = s > e;
  const std::size_t rows = transpose ? e : s;
  const std::size_t cols = transpose ? s : e;
  std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const WorldPoint& t = truth[transpose ? c : r];
      const WorldPoint& q = estimates[transpose ? r : c];
      cost[r][c] = squared_distance(t, q);
    }
  }
  const std::vector<int> assignment = hungarian(cost);

  std::vector<int> est_for_truth(s, -1);
  for (std::size_t r = 0; r < rows; ++r) {
    const int c = assignment[r];
    if (transpose) est_for_truth[static_cast<std::size_t>(c)] = static_cast<int>(r);
    else est_for_truth[r] = c;
  }
  std::vector<char> est_used(e, false);
  for (std::size_t i = 0; i < s; ++i) {
    const int j = est_for_truth[i];
    if (j < 0) {
      out.unmatched_truth.push_back(static_cast<int>(i));
      continue;
    }
    est_used[static_cast<std::size_t>(j)] = true;
    const WorldPoint& e = estimates[static_cast<std::size_t>(j)];
    out.pairs.push_back({static_cast<int>(i), j, distance(truth[i], e), squared_distance(truth[i], e)});
  }
  for (std::size_t j = 0; j < e; ++j) {
    if (!est_used[j]) out.unmatched_estimates.push_back(static_cast<int>(j));
  }
  return out;
}

MatchResult match_estimates(const sim::SourceSet& truth, std::span<const est::SourceEstimate> estimates) {
  std::vector<WorldPoint> pts;
  pts.reserve(estimates.size());
  for (const auto& e : estimates) pts.push_back(e.position);
  return match_estimates(std::span<const WorldPoint>(truth.locations), std::span<const WorldPoint>(pts));
}

RunRecord RunRecord::from_estimates(std::uint64_t id, double sigma_deg, const sim::SourceSet& truth,
                                    std::span<const est::SourceEstimate> estimates) {
  RunRecord rec;
  rec.scenario_id = id;
  rec.sigma_deg = sigma_deg;
  rec.S = static_cast<int>(truth.size());
  rec.S_hat = static_cast<int>(estimates.size());
  for (const auto& p : match_estimates(truth, estimates).pairs) rec.squared_errors.push_back(p.squared_distance);
  return rec;
}

std::optional<double> localization_rmse(std::span<const RunRecord> runs) {
  std::vector<double> errors;
  for (const auto& r : runs) {
    if (!r.failed) errors.insert(errors.end(), r.squared_errors.begin(), r.squared_errors.end());
  }
  if (errors.empty()) return std::nullopt;
  const double n = static_cast<double>(errors.size());
  return std::sqrt(sorted_sum(std::move(errors)) / n);
}

std::optional<double> count_rmse(std::span<const RunRecord> runs) {
  std::vector<double> sq;
  for (const auto& r : runs) {
    if (r.failed) continue;
    const double d = static_cast<double>(r.S - r.S_hat);
    sq.push_back(d * d);
  }
  if (sq.empty()) return std::nullopt;
  const double n = static_cast<double>(sq.size());
  return std::sqrt(sorted_sum(std::move(sq)) / n);
}

MetricsReport summarize(std::span<const RunRecord> runs, const std::string& method, std::uint64_t master_seed) {
  MetricsReport rep;
  rep.method = method;
  rep.master_seed = master_seed;
  std::vector<std::pair<double, int>> order;
  std::map<std::pair<double, int>, std::vector<RunRecord>> cells;
  for (const auto& r : runs) {
    const auto key = std::make_pair(r.sigma_deg, r.S);
    auto [it, inserted] = cells.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(r);
  }
  for (const auto& key : order) {
    const auto& recs = cells.at(key);
    CellReport c;
    c.sigma_deg = key.first;
    c.S = key.second;
    c.M = static_cast<int>(recs.size());
    c.failures = static_cast<int>(std::count_if(recs.begin(), recs.end(), [](const RunRecord& r) { return r.failed; }));
    c.loc_rmse_m = localization_rmse(recs);
    c.count_rmse = count_rmse(recs);
    rep.cells.push_back(c);
    rep.total_failures += c.failures;
  }
  rep.total_runs = static_cast<int>(runs.size());
  rep.loc_rmse_m = localization_rmse(runs);
  rep.count_rmse = count_rmse(runs);
  return rep;
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["master_seed"] = master_seed;
  j["total_runs"] = total_runs;
  j["total_failures"] = total_failures;
  j["loc_rmse_m"] = opt_json(loc_rmse_m);
  j["count_rmse"] = opt_json(count_rmse);
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    arr.push_back({{"sigma_deg", c.sigma_deg},
                   {"S", c.S},
                   {"M", c.M},
                   {"loc_rmse_m", opt_json(c.loc_rmse_m)},
                   {"count_rmse", opt_json(c.count_rmse)},
                   {"failures", c.failures}});
  }
  j["cells"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string MetricsReport::to_csv() const {
  std::string out = "sigma_deg,S,M,loc_rmse_m,count_rmse,failures\n";
  for (const auto& c : cells) {
    out += fmt(c.sigma_deg) + "," + std::to_string(c.S) + "," + std::to_string(c.M) + "," + fmt(c.loc_rmse_m) + "," +
           fmt(c.count_rmse) + "," + std::to_string(c.failures) + "\n";
  }
  return out;
}

Pipeline estimator_pipeline(est::Method method, const PipelineOptions& opts) {
  switch (method) {
    case est::Method::kPls:
      return [opts](const sim::Scenario& s, std::uint64_t) {
        return std::vector<est::SourceEstimate>{est::pls_estimate(s.measurements, opts.pls)};
      };
    case est::Method::kWive:
      return [opts](const sim::Scenario& s, std::uint64_t) {
        est::WiveOptions w = opts.wive;
        if (opts.wive_region_guard) w.bounds = s.config.region;
        return std::vector<est::SourceEstimate>{est::wive_estimate(s.measurements, w)};
      };
    case est::Method::kPsoMl:
      return [opts](const sim::Scenario& s, std::uint64_t seed) {
        est::PsoConfig cfg = opts.pso;
        cfg.bounds = s.config.region;
        cfg.seed = derive_seed(seed, stream_tag("pso"));
        return std::vector<est::SourceEstimate>{est::pso_ml_estimate(s.measurements, cfg)};
      };
    case est::Method::kSegnet:
      break;
  }
  throw Error(ErrorKind::kInvalidArgument, "no in-process pipeline for method " + std::string(est::to_string(method)));
}

Pipeline label_oracle_pipeline(double resolution_m, int dot_radius_px, const post::DecodeOptions& decode) {
  return [=](const sim::Scenario& s, std::uint64_t) {
    const auto grid = raster::GridSpec::from_region(s.config.region, resolution_m);
    const raster::LabelImage label = raster::render_label(s.sources, grid, dot_radius_px);
    post::ProbabilityMap map;
    map.grid = grid;
    map.values = raster::Image<double>(label.width, label.height, 0.0);
    for (std::size_t i = 0; i < label.data.size(); ++i) map.values.data[i] = label.data[i];
    return post::decode(map, decode);
  };
}

std::uint64_t run_seed(std::uint64_t master, std::size_t cell, std::size_t run) {
  return derive_seed(master, cell, run);
}

std::vector<RunRecord> monte_carlo_runs(const MonteCarloConfig& cfg, const Pipeline& pipeline) {
  if (cfg.runs < 1) throw Error(ErrorKind::kInvalidArgument, "Monte-Carlo needs at least 1 run per cell");
  if (cfg.sigmas_deg.empty() || cfg.source_counts.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "Monte-Carlo grid is empty");
  }
  const std::size_t per_cell = static_cast<std::size_t>(cfg.runs);
  const std::size_t cells = cfg.sigmas_deg.size() * cfg.source_counts.size();
  std::vector<RunRecord> records(cells * per_cell);

  parallel_for(records.size(), cfg.threads, [&](std::size_t i) {
    const std::size_t cell = i / per_cell;
    const std::size_t run = i % per_cell;
    const double sigma = cfg.sigmas_deg[cell / cfg.source_counts.size()];
    const int sources = cfg.source_counts[cell % cfg.source_counts.size()];

    sim::ScenarioConfig sc = cfg.base;
    sc.sigma_deg = sigma;
    sc.num_sources = sources;
    sc.max_sources = std::max(sc.max_sources, sources);
    sc.seed = run_seed(cfg.master_seed, cell, run);

    RunRecord rec;
    rec.scenario_id = sc.seed;
    rec.sigma_deg = sigma;
    rec.S = sources;
    try {
      const sim::Scenario scenario = sim::simulate_scenario(sc);
      const auto estimates = pipeline(scenario, sc.seed);
      rec = RunRecord::from_estimates(sc.seed, sigma, scenario.sources, estimates);
    } catch (const Error& e) {
      rec.failed = true;
      rec.failure = std::string(to_string(e.kind())) + ": " + e.what();
    }
    records[i] = std::move(rec);
  });
  return records;
}

MetricsReport monte_carlo(const MonteCarloConfig& cfg, const Pipeline& pipeline, const std::string& method) {
  const auto records = monte_carlo_runs(cfg, pipeline);
  return summarize(records, method, cfg.master_seed);
}

std::vector<TimingRow> benchmark_timings(const std::vector<est::Method>& methods, const BenchmarkConfig& cfg) {
  if (cfg.repetitions < 1) throw Error(ErrorKind::kInvalidArgument, "benchmark needs at least 1 repetition");
  using Clock = std::chrono::steady_clock;
  const std::size_t rows = methods.size() + 1;
  std::vector<std::vector<double>> samples(rows);
  std::vector<Pipeline> pipelines;
  for (const auto m : methods) pipelines.push_back(estimator_pipeline(m, cfg.estimators));
  const auto grid = raster::GridSpec::from_region(cfg.scenario.region, cfg.resolution_m);

  double sink = 0.0;
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    sim::ScenarioConfig sc = cfg.scenario;
    sc.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(rep));
    const sim::Scenario scenario = sim::simulate_scenario(sc);
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const auto t0 = Clock::now();
      try {
        const auto est = pipelines[k](scenario, sc.seed);
        if (!est.empty()) sink += est.front().position.x;
      } catch (const Error&) {
        // Failed solves still count towards the timing.
      }
      samples[k].push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    }
    const auto t0 = Clock::now();
    const raster::InputImage img = raster::render_input(scenario, grid, cfg.render);
    samples.back().push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    sink += img.data[img.data.size() / 2];
  }
  g_sink = sink;

  std::vector<TimingRow> out;
  for (std::size_t k = 0; k < rows; ++k) {
    const auto& xs = samples[k];
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    TimingRow row;
    row.method = k < methods.size() ? std::string(est::to_string(methods[k])) : "preprocessing";
    row.mean_ms = mean;
    row.std_ms = xs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    row.reps = static_cast<int>(xs.size());
    out.push_back(row);
  }
  return out;
}

std::string timings_to_csv(std::span<const TimingRow> rows) {
  std::string out = "method,mean_ms,std_ms,reps\n";
  for (const auto& r : rows) {
    out += r.method + "," + fmt(r.mean_ms) + "," + fmt(r.std_ms) + "," + std::to_string(r.reps) + "\n";
  }
  return out;
}

std::string timings_to_json(std::span<const TimingRow> rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"method", r.method}, {"mean_ms", r.mean_ms}, {"std_ms", r.std_ms}, {"reps", r.reps}});
  }
  return nlohmann::ordered_json{{"timings", arr}}.dump(2) + "\n";
}

}  // namespace aoa::metrics
