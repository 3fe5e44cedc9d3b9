#include "aoa/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "aoa/estimators.hpp"
#include "aoa/metrics.hpp"
#include "aoa/parallel.hpp"
#include "aoa/pgm.hpp"
#include "aoa/postprocess.hpp"
#include "aoa/raster.hpp"
#include "aoa/scenario.hpp"
#include "json.hpp"

namespace aoa::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Default region half-width and the margins it was designed with.
constexpr double kDefaultRegionKm = 100.0;

struct GeometryFlags {
  double speed = 250.0;
  double period_s = 0.0;
  double duration_s = 0.0;
  double heading_deg = 0.0;
  double region_km = kDefaultRegionKm;
  double scale = 1.0;
  std::uint64_t seed = 0;
  int threads = 0;

  // Used when the flag is absent; unset means "draw at random".
  std::optional<double> default_period_s;
  std::optional<double> default_duration_s;

  CLI::Option* period_opt = nullptr;
  CLI::Option* duration_opt = nullptr;
  CLI::Option* heading_opt = nullptr;
};

void add_geometry_flags(CLI::App* app, GeometryFlags& f, bool with_scale = true) {
  app->add_option("--speed", f.speed, "platform speed, m/s")->capture_default_str();
  f.period_opt = app->add_option("--period-s", f.period_s, "sampling period, s (default U(3, 15))");
  f.duration_opt = app->add_option("--duration-s", f.duration_s, "track duration, s (default U(180, 300))");
  f.heading_opt = app->add_option("--heading-deg", f.heading_deg, "heading, deg CCW from East (default U(0, 360))");
  app->add_option("--region-km", f.region_km, "region half-width, km")->capture_default_str();
  if (with_scale) {
    app->add_option("--scale", f.scale, "shrink region, margins and speed by this factor")->capture_default_str();
  }
  app->add_option("--seed", f.seed, "master seed")->capture_default_str();
}

void add_threads_flag(CLI::App* app, GeometryFlags& f) {
  app->add_option("--threads", f.threads, "worker count (default: AOA_THREADS or hardware)");
}

int thread_count(const GeometryFlags& f) { return f.threads > 0 ? f.threads : default_thread_count(); }

// Usage errors surface before any file is touched.
template <typename Fn>
auto checked(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kInvalidArgument) throw UsageError(e.what());
    throw;
  }
}

sim::ScenarioConfig make_config(const GeometryFlags& f, double sigma_deg, int sources) {
  return checked([&] {
    if (!(f.region_km > 0.0) || !std::isfinite(f.region_km)) {
      throw Error(ErrorKind::kInvalidArgument, "--region-km must be > 0");
    }
    sim::ScenarioConfig c;
    c.sigma_deg = sigma_deg;
    c.num_sources = sources;
    c.max_sources = std::max(c.max_sources, sources);
    c.speed = f.speed;
    c.period_s = f.period_opt && f.period_opt->count() ? std::optional(f.period_s) : f.default_period_s;
    c.duration_s = f.duration_opt && f.duration_opt->count() ? std::optional(f.duration_s) : f.default_duration_s;
    if (f.heading_opt && f.heading_opt->count()) c.heading_deg = f.heading_deg;
    // Margins keep their proportion to the region half-width.
    const double ratio = f.region_km / kDefaultRegionKm;
    c.region = Region::centered(f.region_km * 1000.0);
    c.start_margin_m *= ratio;
    c.source_margin_m *= ratio;
    c.seed = f.seed;
    if (f.scale != 1.0) c = c.scaled(f.scale);
    c.validate();
    return c;
  });
}

raster::GridSpec make_grid(const Region& region, double resolution) {
  return checked([&] { return raster::GridSpec::from_region(region, resolution); });
}

Json region_json(const Region& r) {
  return {{"x_min", r.x_min}, {"x_max", r.x_max}, {"y_min", r.y_min}, {"y_max", r.y_max}};
}

Json grid_json(const raster::GridSpec& g) {
  return {{"region", region_json(g.region)},
          {"resolution_m", g.resolution},
          {"width", g.width},
          {"height", g.height},
          {"row_order", "north-up"}};
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json config_json(const sim::ScenarioConfig& c) {
  Json j;
  j["sigma_deg"] = c.sigma_deg;
  j["num_sources"] = c.num_sources;
  j["speed"] = c.speed;
  j["heading_deg"] = optional_json(c.heading_deg);
  j["period_s"] = optional_json(c.period_s);
  j["duration_s"] = optional_json(c.duration_s);
  j["region"] = region_json(c.region);
  j["start_margin_m"] = c.start_margin_m;
  j["source_margin_m"] = c.source_margin_m;
  return j;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json parse_json(const std::string& text, const fs::path& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, origin.string() + ": " + e.what());
  }
}

/// Manifest skeleton; `body` carries the command-specific fields.
void write_manifest(const fs::path& dir, const std::string& command, const std::vector<std::string>& args,
                    std::uint64_t master_seed, Json body) {
  Json j;
  j["tool"] = "aoa";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["args"] = args;
  j["master_seed"] = master_seed;
  j["created_utc"] = utc_now();
  for (auto& [k, v] : body.items()) j[k] = v;
  write_text(dir / "manifest.json", j.dump(1) + "\n");
}

void prepare_out_dir(const fs::path& dir, bool force, bool require_empty) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw UsageError(dir.string() + " exists and is not a directory");
    if (require_empty && !force && !fs::is_empty(dir)) {
      throw UsageError(dir.string() + " is not empty; pass --force to overwrite");
    }
  } else {
    fs::create_directories(dir);
  }
}

Json diagnostics_json(const est::Diagnostics& d) {
  Json j;
  j["residual_norm"] = optional_json(d.residual_norm);
  j["iterations"] = d.iterations ? Json(*d.iterations) : Json(nullptr);
  j["cost"] = optional_json(d.cost);
  j["initial_best_cost"] = optional_json(d.initial_best_cost);
  j["rows_used"] = d.rows_used;
  j["rows_excluded"] = d.rows_excluded;
  if (d.left_region) j["left_region"] = true;
  return j;
}

Json estimates_json(const std::vector<est::SourceEstimate>& estimates) {
  Json arr = Json::array();
  for (const auto& e : estimates) {
    arr.push_back({{"x", e.position.x}, {"y", e.position.y}, {"diagnostics", diagnostics_json(e.diagnostics)}});
  }
  return arr;
}

void append_results(const fs::path& path, const std::vector<Json>& records) {
  Json doc;
  if (fs::exists(path)) {
    doc = parse_json(read_text(path), path);
    if (!doc.is_object() || !doc.contains("results") || !doc["results"].is_array()) {
      throw Error(ErrorKind::kFormat, path.string() + ": not a results file (missing \"results\" array)");
    }
  } else {
    doc["results"] = Json::array();
  }
  for (const auto& r : records) doc["results"].push_back(r);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text(path, doc.dump(1) + "\n");
}

// ---- simulate ---------------------------------------------------------------

struct SimulateFlags {
  GeometryFlags geo;
  double sigma_deg = 1.0;
  int sources = 1;
  int count = 1;
  std::string out = ".";
};

int cmd_simulate(const SimulateFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  if (f.count < 1) throw UsageError("--count must be >= 1");
  const sim::ScenarioConfig base = make_config(f.geo, f.sigma_deg, f.sources);
  const fs::path dir(f.out);
  prepare_out_dir(dir, true, false);

  std::vector<std::string> names;
  Json samples = Json::array();
  for (int k = 0; k < f.count; ++k) {
    names.push_back("scenario_" + std::to_string(k) + ".json");
    samples.push_back({{"k", k},
                       {"seed", metrics::run_seed(f.geo.seed, 0, static_cast<std::size_t>(k))},
                       {"file", names.back()}});
  }
  write_manifest(dir, "simulate", args, f.geo.seed, {{"config", config_json(base)}, {"outputs", samples}});

  for (int k = 0; k < f.count; ++k) {
    sim::ScenarioConfig c = base;
    c.seed = metrics::run_seed(f.geo.seed, 0, static_cast<std::size_t>(k));
    sim::write_scenario(dir / names[static_cast<std::size_t>(k)], sim::simulate_scenario(c));
  }
  out << "wrote " << f.count << " scenario file(s) to " << dir.string() << "\n";
  return kExitOk;
}

// ---- estimate ---------------------------------------------------------------

struct EstimateFlags {
  std::vector<std::string> scenarios;
  std::string method = "pls";
  std::string out = "results.json";
  std::string row_form;
  std::string weighting = "inverse";
  int wive_iterations = 20;
  bool no_align = false;
  bool no_region_guard = false;
  int pso_particles = 50;
  int pso_iterations = 200;
};

metrics::PipelineOptions pipeline_options(const EstimateFlags& f) {
  metrics::PipelineOptions o;
  if (!f.row_form.empty()) {
    const auto form = f.row_form == "tan" ? est::RowForm::kTangent : est::RowForm::kSinCos;
    o.pls.row_form = form;
    o.wive.row_form = form;
  }
  o.wive.weighting = f.weighting == "literal" ? est::WiveWeighting::kLiteral : est::WiveWeighting::kInverse;
  o.wive.max_iterations = f.wive_iterations;
  o.wive.align_instruments = !f.no_align;
  o.wive_region_guard = !f.no_region_guard;
  o.pso.particles = f.pso_particles;
  o.pso.iterations = f.pso_iterations;
  checked([&] {
    if (o.wive.max_iterations < 1) throw Error(ErrorKind::kInvalidArgument, "--wive-iterations must be >= 1");
    est::PsoConfig probe = o.pso;
    probe.validate();
    return 0;
  });
  return o;
}

int cmd_estimate(const EstimateFlags& f, std::ostream& out, std::ostream& err) {
  const est::Method method = checked([&] { return est::method_from_string(f.method); });
  const metrics::Pipeline pipeline = metrics::estimator_pipeline(method, pipeline_options(f));

  std::vector<Json> records;
  int failures = 0;
  for (const auto& file : f.scenarios) {
    const sim::Scenario s = sim::read_scenario(file);
    Json rec;
    rec["scenario"] = file;
    rec["scenario_seed"] = s.config.seed;
    rec["method"] = std::string(est::to_string(method));
    Json warnings = Json::array();
    if (s.sources.size() > 1) {
      const std::string w = "scenario has " + std::to_string(s.sources.size()) +
                            " sources; classical estimators assume a single source and return one estimate";
      warnings.push_back(w);
      err << "warning: " << file << ": " << w << "\n";
    }
    try {
      const auto estimates = pipeline(s, s.config.seed);
      rec["failed"] = false;
      rec["S_hat"] = estimates.size();
      rec["estimates"] = estimates_json(estimates);
      for (const auto& e : estimates) {
        out << file << " " << est::to_string(method) << " x=" << e.position.x << " y=" << e.position.y << "\n";
      }
    } catch (const Error& e) {
      ++failures;
      rec["failed"] = true;
      rec["error"] = std::string(to_string(e.kind())) + ": " + e.what();
      rec["S_hat"] = 0;
      rec["estimates"] = Json::array();
      err << "error: " << file << ": " << e.what() << "\n";
    }
    rec["warnings"] = warnings;
    records.push_back(std::move(rec));
  }
  append_results(f.out, records);
  return failures ? kExitFailure : kExitOk;
}

// ---- gen-dataset ------------------------------------------------------------

struct DatasetFlags {
  GeometryFlags geo;
  std::vector<double> sigmas{0.5, 1.0, 1.5, 2.0, 2.5};
  std::vector<int> sources{1, 2, 3, 4, 5};
  int count = 1000;
  double resolution_m = 250.0;
  int label_radius = 0;
  int marker_radius = 3;
  bool antialias = false;
  std::string out;
  bool force = false;
};

int cmd_gen_dataset(const DatasetFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  if (f.count < 1) throw UsageError("--count must be >= 1");
  if (f.label_radius < 0 || f.marker_radius < 0) throw UsageError("radii must be >= 0");
  struct Cell {
    double sigma;
    int sources;
    sim::ScenarioConfig config;
  };
  std::vector<Cell> cells;
  for (double sigma : f.sigmas) {
    for (int s : f.sources) cells.push_back({sigma, s, make_config(f.geo, sigma, s)});
  }
  if (cells.empty()) throw UsageError("empty sigma / sources grid");
  const raster::GridSpec grid = make_grid(cells.front().config.region, f.resolution_m);
  const raster::RenderOptions render{f.marker_radius, f.antialias};

  const fs::path dir(f.out);
  prepare_out_dir(dir, f.force, true);

  Json cells_json = Json::array();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    Json samples = Json::array();
    for (int k = 0; k < f.count; ++k) {
      samples.push_back({{"k", k},
                         {"seed", metrics::run_seed(f.geo.seed, c, static_cast<std::size_t>(k))},
                         {"stem", "sample_" + std::to_string(c) + "_" + std::to_string(k)}});
    }
    cells_json.push_back(
        {{"cell", c}, {"sigma_deg", cells[c].sigma}, {"sources", cells[c].sources}, {"count", f.count},
         {"samples", std::move(samples)}});
  }
  Json body;
  body["scale"] = f.geo.scale;
  body["config"] = config_json(cells.front().config);
  body["grid"] = grid_json(grid);
  body["render"] = {{"marker_radius_px", render.marker_radius_px}, {"antialias", render.antialias}};
  body["label_dot_radius_px"] = f.label_radius;
  body["layout"] = {{"input", "<stem>_input.pgm"}, {"label", "<stem>_label.pgm"}, {"scenario", "<stem>.json"}};
  body["cells"] = std::move(cells_json);
  write_manifest(dir, "gen-dataset", args, f.geo.seed, std::move(body));

  const std::size_t per_cell = static_cast<std::size_t>(f.count);
  parallel_for(cells.size() * per_cell, thread_count(f.geo), [&](std::size_t i) {
    const std::size_t c = i / per_cell;
    const std::size_t k = i % per_cell;
    sim::ScenarioConfig cfg = cells[c].config;
    cfg.seed = metrics::run_seed(f.geo.seed, c, k);
    const sim::Scenario s = sim::simulate_scenario(cfg);
    const std::string stem = "sample_" + std::to_string(c) + "_" + std::to_string(k);
    raster::write_pgm(dir / (stem + "_input.pgm"), raster::input_to_pgm(raster::render_input(s, grid, render), grid));
    raster::write_pgm(dir / (stem + "_label.pgm"),
                      raster::label_to_pgm(raster::render_label(s.sources, grid, f.label_radius), grid));
    sim::write_scenario(dir / (stem + ".json"), s);
  });
  out << "wrote " << cells.size() * per_cell << " samples (" << grid.width << "x" << grid.height << ") to "
      << dir.string() << "\n";
  return kExitOk;
}

// ---- decode -----------------------------------------------------------------

struct DecodeFlags {
  std::string map;
  std::string scenario;
  std::string out = "results.json";
  double threshold = 0.5;
  int min_area = 1;
  int connectivity = 8;
  bool weighted = false;
  double region_km = 0.0;
  double resolution_m = 250.0;
};

int cmd_decode(const DecodeFlags& f, std::ostream& out) {
  if (f.min_area < 1) throw UsageError("--min-area must be >= 1");
  post::DecodeOptions opts;
  opts.threshold = f.threshold;
  opts.min_area = f.min_area;
  opts.connectivity = checked([&] { return post::connectivity_from_int(f.connectivity); });
  opts.weighted_centroid = f.weighted;
  std::optional<raster::GridSpec> fallback;
  if (f.region_km > 0.0) fallback = make_grid(Region::centered(f.region_km * 1000.0), f.resolution_m);

  const post::ProbabilityMap map = post::read_probability_map(f.map, fallback);
  const auto estimates = post::decode(map, opts);

  Json rec;
  rec["source"] = f.map;
  if (!f.scenario.empty()) {
    rec["scenario"] = f.scenario;
    rec["scenario_seed"] = sim::read_scenario(f.scenario).config.seed;
  }
  rec["method"] = std::string(est::to_string(est::Method::kSegnet));
  rec["threshold"] = opts.threshold;
  rec["min_area"] = opts.min_area;
  rec["connectivity"] = static_cast<int>(opts.connectivity);
  rec["failed"] = false;
  rec["S_hat"] = estimates.size();
  rec["estimates"] = estimates_json(estimates);
  rec["warnings"] = Json::array();
  append_results(f.out, {rec});
  out << f.map << " S_hat=" << estimates.size() << "\n";
  for (const auto& e : estimates) out << "  x=" << e.position.x << " y=" << e.position.y << "\n";
  return kExitOk;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateFlags {
  std::vector<std::string> results;
  std::string truth_dir;
  std::string out = ".";
};

fs::path resolve_truth(const std::string& stored, const fs::path& results_file, const std::string& truth_dir) {
  const fs::path p(stored);
  if (!truth_dir.empty()) return fs::path(truth_dir) / p.filename();
  if (p.is_absolute() || fs::exists(p)) return p;
  return results_file.parent_path() / p;
}

int cmd_evaluate(const EvaluateFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  std::map<std::string, std::vector<metrics::RunRecord>> by_method;
  std::vector<std::string> method_order;
  for (const auto& file : f.results) {
    const Json doc = parse_json(read_text(file), file);
    if (!doc.is_object() || !doc.contains("results") || !doc["results"].is_array()) {
      throw Error(ErrorKind::kFormat, file + ": not a results file (missing \"results\" array)");
    }
    std::size_t index = 0;
    for (const auto& rec : doc["results"]) {
      const std::string where = file + ": record " + std::to_string(index++);
      try {
        if (!rec.contains("scenario")) {
          throw Error(ErrorKind::kFormat, where + " names no scenario file (decode with --scenario)");
        }
        const sim::Scenario truth = sim::read_scenario(resolve_truth(rec.at("scenario"), file, f.truth_dir));
        const std::string method = rec.at("method");
        std::vector<est::SourceEstimate> estimates;
        for (const auto& e : rec.at("estimates")) {
          est::SourceEstimate se;
          se.position = {e.at("x").get<double>(), e.at("y").get<double>()};
          estimates.push_back(se);
        }
        metrics::RunRecord run =
            metrics::RunRecord::from_estimates(truth.config.seed, truth.config.sigma_deg, truth.sources, estimates);
        if (rec.value("failed", false)) {
          run.failed = true;
          run.failure = rec.value("error", std::string("estimator failure"));
          run.S_hat = 0;
          run.squared_errors.clear();
        }
        if (!by_method.count(method)) method_order.push_back(method);
        by_method[method].push_back(std::move(run));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::kFormat, where + ": " + e.what());
      }
    }
  }

  const fs::path dir(f.out);
  prepare_out_dir(dir, true, false);
  Json outputs = Json::array();
  for (const auto& m : method_order) {
    outputs.push_back("metrics_" + m + ".json");
    outputs.push_back("metrics_" + m + ".csv");
  }
  write_manifest(dir, "evaluate", args, 0, {{"inputs", f.results}, {"outputs", outputs}});
  for (const auto& m : method_order) {
    const metrics::MetricsReport rep = metrics::summarize(by_method[m], m, 0);
    write_text(dir / ("metrics_" + m + ".json"), rep.to_json());
    write_text(dir / ("metrics_" + m + ".csv"), rep.to_csv());
    out << m << ": runs=" << rep.total_runs << " failures=" << rep.total_failures << " loc_rmse_m="
        << (rep.loc_rmse_m ? std::to_string(*rep.loc_rmse_m) : "n/a")
        << " count_rmse=" << (rep.count_rmse ? std::to_string(*rep.count_rmse) : "n/a") << "\n";
  }
  return kExitOk;
}

// ---- bench ------------------------------------------------------------------

struct BenchFlags {
  GeometryFlags geo;
  double sigma_deg = 1.0;
  int reps = 100;
  std::vector<std::string> methods{"pls", "wive", "pso-ml"};
  double resolution_m = 250.0;
  std::string out;
};

int cmd_bench(const BenchFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  if (f.reps < 1) throw UsageError("--reps must be >= 1");
  metrics::BenchmarkConfig cfg;
  cfg.scenario = make_config(f.geo, f.sigma_deg, 1);
  cfg.repetitions = f.reps;
  cfg.master_seed = f.geo.seed;
  cfg.resolution_m = f.resolution_m;
  make_grid(cfg.scenario.region, f.resolution_m);
  std::vector<est::Method> methods;
  for (const auto& m : f.methods) methods.push_back(checked([&] { return est::method_from_string(m); }));

  std::optional<fs::path> dir;
  if (!f.out.empty()) {
    dir = fs::path(f.out);
    prepare_out_dir(*dir, true, false);
    write_manifest(*dir, "bench", args, f.geo.seed,
                   {{"config", config_json(cfg.scenario)},
                    {"repetitions", f.reps},
                    {"outputs", {"bench_timings.csv", "bench_timings.json"}}});
  }
  const auto rows = metrics::benchmark_timings(methods, cfg);
  const std::string csv = metrics::timings_to_csv(rows);
  if (dir) {
    write_text(*dir / "bench_timings.csv", csv);
    write_text(*dir / "bench_timings.json", metrics::timings_to_json(rows));
  }
  out << csv;
  return kExitOk;
}

// ---- mc ---------------------------------------------------------------------

struct McFlags {
  GeometryFlags geo;
  std::vector<double> sigmas{0.5, 1.0, 1.5, 2.0, 2.5};
  std::vector<int> sources{1, 2, 3, 4, 5};
  int runs = 100;
  std::string method = "pls";
  double resolution_m = 250.0;
  std::string out;
  EstimateFlags est;
};

int cmd_mc(const McFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  if (f.runs < 1) throw UsageError("--runs must be >= 1");
  metrics::MonteCarloConfig cfg;
  cfg.sigmas_deg = f.sigmas;
  cfg.source_counts = f.sources;
  cfg.runs = f.runs;
  cfg.master_seed = f.geo.seed;
  cfg.threads = thread_count(f.geo);
  for (double s : f.sigmas) {
    for (int n : f.sources) make_config(f.geo, s, n);
  }
  cfg.base = make_config(f.geo, f.sigmas.empty() ? 1.0 : f.sigmas.front(), 1);

  metrics::Pipeline pipeline;
  if (f.method == "label-oracle") {
    make_grid(cfg.base.region, f.resolution_m);
    pipeline = metrics::label_oracle_pipeline(f.resolution_m);
  } else {
    pipeline = metrics::estimator_pipeline(checked([&] { return est::method_from_string(f.method); }),
                                           pipeline_options(f.est));
  }

  std::optional<fs::path> dir;
  if (!f.out.empty()) {
    dir = fs::path(f.out);
    prepare_out_dir(*dir, true, false);
    write_manifest(*dir, "mc", args, f.geo.seed,
                   {{"method", f.method},
                    {"config", config_json(cfg.base)},
                    {"sigmas_deg", f.sigmas},
                    {"sources", f.sources},
                    {"runs", f.runs},
                    {"outputs", {"metrics_" + f.method + ".json", "metrics_" + f.method + ".csv"}}});
  }
  const metrics::MetricsReport rep = metrics::monte_carlo(cfg, pipeline, f.method);
  if (dir) {
    write_text(*dir / ("metrics_" + f.method + ".json"), rep.to_json());
    write_text(*dir / ("metrics_" + f.method + ".csv"), rep.to_csv());
  }
  out << rep.to_csv();
  return kExitOk;
}

void add_estimator_flags(CLI::App* app, EstimateFlags& f) {
  app->add_option("--row-form", f.row_form, "pseudo-linear rows: tan or sincos (default pls=tan, wive=sincos)")
      ->check(CLI::IsMember({"tan", "sincos"}));
  app->add_option("--weighting", f.weighting, "WIVE weights: inverse (1/R^2) or literal (R^2)")
      ->check(CLI::IsMember({"inverse", "literal"}))
      ->capture_default_str();
  app->add_option("--wive-iterations", f.wive_iterations, "WIVE reweighting passes")->capture_default_str();
  app->add_flag("--no-align", f.no_align, "do not sign-align WIVE instruments with the pseudo-linear rows");
  app->add_flag("--no-region-guard", f.no_region_guard, "let WIVE iterates leave the scenario region");
  app->add_option("--pso-particles", f.pso_particles, "PSO swarm size")->capture_default_str();
  app->add_option("--pso-iterations", f.pso_iterations, "PSO iterations")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Angle-of-arrival emitter localization toolkit", "aoa"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  SimulateFlags sim_f;
  auto* sim_cmd = app.add_subcommand("simulate", "generate seeded scenario files");
  sim_cmd->add_option("--sigma-deg", sim_f.sigma_deg, "bearing noise std, deg")->capture_default_str();
  sim_cmd->add_option("--sources", sim_f.sources, "number of sources")->capture_default_str();
  sim_cmd->add_option("--count", sim_f.count, "number of scenarios")->capture_default_str();
  sim_cmd->add_option("--out", sim_f.out, "output directory")->capture_default_str();
  sim_cmd->add_flag("--force", "accepted for symmetry; simulate always overwrites its own files");
  add_geometry_flags(sim_cmd, sim_f.geo);

  EstimateFlags est_f;
  auto* est_cmd = app.add_subcommand("estimate", "run a classical estimator on scenario files");
  est_cmd->add_option("scenario", est_f.scenarios, "scenario JSON file(s)")->required();
  est_cmd->add_option("--method", est_f.method, "pls, wive or pso-ml")
      ->check(CLI::IsMember({"pls", "wive", "pso-ml"}))
      ->capture_default_str();
  est_cmd->add_option("--out", est_f.out, "results file (appended)")->capture_default_str();
  add_estimator_flags(est_cmd, est_f);

  DatasetFlags ds_f;
  auto* ds_cmd = app.add_subcommand("gen-dataset", "render (input, label, scenario) training triples");
  ds_cmd->add_option("--sigma-deg", ds_f.sigmas, "noise levels, deg")->capture_default_str();
  ds_cmd->add_option("--sources", ds_f.sources, "source counts")->capture_default_str();
  ds_cmd->add_option("--count", ds_f.count, "samples per (sigma, sources) cell")->capture_default_str();
  ds_cmd->add_option("--resolution-m", ds_f.resolution_m, "pixel size, m")->capture_default_str();
  ds_cmd->add_option("--label-radius", ds_f.label_radius, "label dot radius, px")->capture_default_str();
  ds_cmd->add_option("--marker-radius", ds_f.marker_radius, "platform marker radius, px")->capture_default_str();
  ds_cmd->add_flag("--antialias", ds_f.antialias, "anti-aliased DF rays");
  ds_cmd->add_option("--out", ds_f.out, "output directory")->required();
  ds_cmd->add_flag("--force", ds_f.force, "write into a non-empty directory");
  add_geometry_flags(ds_cmd, ds_f.geo);
  add_threads_flag(ds_cmd, ds_f.geo);

  DecodeFlags dec_f;
  auto* dec_cmd = app.add_subcommand("decode", "probability map -> source estimates");
  dec_cmd->add_option("map", dec_f.map, "probability map PGM")->required();
  dec_cmd->add_option("--scenario", dec_f.scenario, "scenario file recorded as ground truth for evaluate");
  dec_cmd->add_option("--out", dec_f.out, "results file (appended)")->capture_default_str();
  dec_cmd->add_option("--threshold", dec_f.threshold, "foreground threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  dec_cmd->add_option("--min-area", dec_f.min_area, "smallest component kept, px")->capture_default_str();
  dec_cmd->add_option("--connectivity", dec_f.connectivity, "4 or 8")
      ->check(CLI::IsMember({4, 8}))
      ->capture_default_str();
  dec_cmd->add_flag("--weighted-centroid", dec_f.weighted, "probability-weighted centroids");
  dec_cmd->add_option("--region-km", dec_f.region_km, "grid half-width when the map carries no grid comment");
  dec_cmd->add_option("--resolution-m", dec_f.resolution_m, "pixel size for --region-km")->capture_default_str();

  EvaluateFlags ev_f;
  auto* ev_cmd = app.add_subcommand("evaluate", "results + truth -> metrics CSV/JSON");
  ev_cmd->add_option("results", ev_f.results, "results file(s)")->required();
  ev_cmd->add_option("--truth-dir", ev_f.truth_dir, "look up scenario files here by file name");
  ev_cmd->add_option("--out", ev_f.out, "output directory")->capture_default_str();

  BenchFlags bench_f;
  // Fixed benchmark shape: a bearing every 3 s over 300 s.
  bench_f.geo.default_period_s = 3.0;
  bench_f.geo.default_duration_s = 300.0;
  auto* bench_cmd = app.add_subcommand("bench", "per-method wall-clock timings");
  bench_cmd->add_option("--sigma-deg", bench_f.sigma_deg, "bearing noise std, deg")->capture_default_str();
  bench_cmd->add_option("--reps", bench_f.reps, "repetitions")->capture_default_str();
  bench_cmd->add_option("--method", bench_f.methods, "methods to time")
      ->check(CLI::IsMember({"pls", "wive", "pso-ml"}))
      ->capture_default_str();
  bench_cmd->add_option("--resolution-m", bench_f.resolution_m, "pixel size for the render row")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench_f.out, "output directory for CSV + JSON");
  add_geometry_flags(bench_cmd, bench_f.geo);
  bench_f.geo.period_opt->description("sampling period, s (default 3)");
  bench_f.geo.duration_opt->description("track duration, s (default 300)");

  McFlags mc_f;
  auto* mc_cmd = app.add_subcommand("mc", "Monte-Carlo RMSE over a (sigma, sources) grid");
  mc_cmd->add_option("--sigma-deg", mc_f.sigmas, "noise levels, deg")->capture_default_str();
  mc_cmd->add_option("--sources", mc_f.sources, "source counts")->capture_default_str();
  mc_cmd->add_option("--runs", mc_f.runs, "runs per cell")->capture_default_str();
  mc_cmd->add_option("--method", mc_f.method, "pls, wive, pso-ml or label-oracle")
      ->check(CLI::IsMember({"pls", "wive", "pso-ml", "label-oracle"}))
      ->capture_default_str();
  mc_cmd->add_option("--resolution-m", mc_f.resolution_m, "pixel size for label-oracle")->capture_default_str();
  mc_cmd->add_option("--out", mc_f.out, "output directory for metrics CSV + JSON");
  add_geometry_flags(mc_cmd, mc_f.geo);
  add_threads_flag(mc_cmd, mc_f.geo);
  add_estimator_flags(mc_cmd, mc_f.est);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim_cmd->parsed()) return cmd_simulate(sim_f, args, out);
    if (est_cmd->parsed()) return cmd_estimate(est_f, out, err);
    if (ds_cmd->parsed()) return cmd_gen_dataset(ds_f, args, out);
    if (dec_cmd->parsed()) return cmd_decode(dec_f, out);
    if (ev_cmd->parsed()) return cmd_evaluate(ev_f, args, out);
    if (bench_cmd->parsed()) return cmd_bench(bench_f, args, out);
    if (mc_cmd->parsed()) return cmd_mc(mc_f, args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace aoa::cli
