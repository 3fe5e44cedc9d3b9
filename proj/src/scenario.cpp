#include "aoa/scenario.hpp"

#include <cmath>
#include <random>

namespace aoa::sim {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kInvalidArgument, what);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void ScenarioConfig::validate() const {
  require(positive_finite(sigma_deg), "sigma_deg must be > 0");
  require(max_sources >= 1, "max_sources must be >= 1");
  require(num_sources >= 1 && num_sources <= max_sources,
          "num_sources must be in [1, " + std::to_string(max_sources) + "]");
  require(positive_finite(speed), "speed must be > 0");
  require(!heading_deg || std::isfinite(*heading_deg), "heading_deg must be finite");
  require(!period_s || positive_finite(*period_s), "period_s must be > 0");
  require(!duration_s || positive_finite(*duration_s), "duration_s must be > 0");
  require(!(period_s && duration_s) || *period_s <= *duration_s, "period_s must not exceed duration_s");
  require(region.valid(), "region must satisfy x_min < x_max and y_min < y_max");
  require(!start || (start->finite() && region.contains(*start)), "start must lie inside the region");
  require(std::isfinite(start_margin_m) && start_margin_m >= 0.0, "start_margin_m must be >= 0");
  require(std::isfinite(source_margin_m) && source_margin_m >= 0.0, "source_margin_m must be >= 0");
  require(max_retries >= 1, "max_retries must be >= 1");
}

ScenarioConfig ScenarioConfig::scaled(double factor) const {
  require(positive_finite(factor), "scale factor must be > 0");
  ScenarioConfig c = *this;
  c.region = {region.x_min * factor, region.x_max * factor, region.y_min * factor,
              region.y_max * factor};
  c.start_margin_m *= factor;
  c.source_margin_m *= factor;
  c.speed *= factor;
  if (start) c.start = WorldPoint{start->x * factor, start->y * factor};
  return c;
}

std::size_t state_count(double duration_s, double period_s) {
  return static_cast<std::size_t>(std::floor(duration_s / period_s)) + 1;
}

double true_bearing(const WorldPoint& platform, const WorldPoint& source) {
  return bearing(platform, source);
}

double perturb_bearing(double theta, double sigma, Rng& rng) {
  std::normal_distribution<double> noise(0.0, sigma);
  return wrap_angle(theta + noise(rng));
}

PlatformTrajectory generate_trajectory(const ScenarioConfig& config, Rng& rng) {
  config.validate();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  PlatformTrajectory traj;
  traj.speed = config.speed;
  traj.heading_deg = config.heading_deg ? *config.heading_deg : draw(0.0, 360.0);
  traj.period_s = config.period_s ? *config.period_s : draw(3.0, 15.0);
  traj.duration_s = config.duration_s ? *config.duration_s : draw(180.0, 300.0);

  const std::size_t n = state_count(traj.duration_s, traj.period_s);
  const double heading = deg_to_rad(traj.heading_deg);
  const double ux = std::cos(heading);
  const double uy = std::sin(heading);
  const double t_end = static_cast<double>(n - 1) * traj.period_s;

  const auto end_point = [&](const WorldPoint& s) {
    return WorldPoint{s.x + config.speed * t_end * ux, s.y + config.speed * t_end * uy};
  };

  WorldPoint start;
  if (config.start) {
    start = *config.start;
    if (!config.region.contains(end_point(start))) {
      throw Error(ErrorKind::kTrajectoryRejected, "trajectory from the fixed start leaves the region");
    }
  } else {
    const Region box = config.region.shrunk(config.start_margin_m);
    bool accepted = false;
    for (int attempt = 0; attempt < config.max_retries && !accepted; ++attempt) {
      start = {draw(box.x_min, box.x_max), draw(box.y_min, box.y_max)};
      accepted = config.region.contains(end_point(start));
    }
    if (!accepted) {
      throw Error(ErrorKind::kTrajectoryRejected,
                  "no in-region trajectory after " + std::to_string(config.max_retries) + " attempts");
    }
  }

  traj.states.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * traj.period_s;
    traj.states.push_back({t, {start.x + config.speed * t * ux, start.y + config.speed * t * uy}});
  }
  return traj;
}

SourceSet place_sources(const ScenarioConfig& config, Rng& rng) {
  config.validate();
  const Region box = config.region.shrunk(config.source_margin_m);
  std::uniform_real_distribution<double> ux(box.x_min, box.x_max);
  std::uniform_real_distribution<double> uy(box.y_min, box.y_max);
  SourceSet out;
  out.locations.reserve(static_cast<std::size_t>(config.num_sources));
  for (int s = 0; s < config.num_sources; ++s) {
    const double x = ux(rng);
    const double y = uy(rng);
    out.locations.push_back({x, y});
  }
  return out;
}

Scenario simulate_scenario(const ScenarioConfig& config) {
  config.validate();
  Rng traj_rng = make_stream(config.seed, "trajectory");
  Rng source_rng = make_stream(config.seed, "sources");
  Rng noise_rng = make_stream(config.seed, "noise");

  Scenario sc;
  sc.config = config;
  sc.trajectory = generate_trajectory(config, traj_rng);
  sc.sources = place_sources(config, source_rng);

  const double sigma = deg_to_rad(config.sigma_deg);
  const std::size_t s_count = sc.sources.size();
  sc.measurements.bearings.reserve(sc.trajectory.states.size() * s_count);
  sc.provenance.reserve(sc.trajectory.states.size() * s_count);
  for (std::size_t n = 0; n < sc.trajectory.states.size(); ++n) {
    const PlatformState& st = sc.trajectory.states[n];
    for (std::size_t s = 0; s < s_count; ++s) {
      AoABearing b;
      b.index = static_cast<int>(n);
      b.t = st.t;
      b.platform = st.position;
      b.theta_true = true_bearing(st.position, sc.sources.locations[s]);
      b.theta_meas = perturb_bearing(b.theta_true, sigma, noise_rng);
      b.sigma = sigma;
      sc.measurements.bearings.push_back(b);
      sc.provenance.push_back(static_cast<int>(s));
    }
  }
  return sc;
}

}  // namespace aoa::sim
