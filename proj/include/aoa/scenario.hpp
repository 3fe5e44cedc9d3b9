#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aoa/geometry.hpp"
#include "aoa/rng.hpp"

namespace aoa::sim {

struct PlatformState {
  double t = 0.0;  // seconds
  WorldPoint position;

  friend bool operator==(const PlatformState&, const PlatformState&) = default;
};

/// Straight-line, constant-speed receiver track sampled every period_s.
/// Heading is mathematical: degrees counter-clockwise from +x (East).
struct PlatformTrajectory {
  std::vector<PlatformState> states;
  double speed = 250.0;
  double heading_deg = 0.0;
  double period_s = 0.0;
  double duration_s = 0.0;

  friend bool operator==(const PlatformTrajectory&, const PlatformTrajectory&) = default;
};

struct SourceSet {
  std::vector<WorldPoint> locations;

  std::size_t size() const { return locations.size(); }
  friend bool operator==(const SourceSet&, const SourceSet&) = default;
};

struct AoABearing {
  int index = 0;  // platform state index n
  double t = 0.0;
  WorldPoint platform;
  double theta_true = 0.0;  // radians, (-pi, pi]
  double theta_meas = 0.0;  // radians, (-pi, pi]
  double sigma = 0.0;       // radians

  friend bool operator==(const AoABearing&, const AoABearing&) = default;
};

/// Flat, unlabeled bearing list: everything an estimator may look at.
/// The bearing-to-source association lives in Scenario::provenance.
struct MeasurementSet {
  std::vector<AoABearing> bearings;

  std::size_t size() const { return bearings.size(); }
  bool empty() const { return bearings.empty(); }
  friend bool operator==(const MeasurementSet&, const MeasurementSet&) = default;
};

struct ScenarioConfig {
  double sigma_deg = 1.0;
  int num_sources = 1;
  int max_sources = 5;
  double speed = 250.0;                 // m/s
  std::optional<double> heading_deg;    // unset: U(0, 360)
  std::optional<double> period_s;       // unset: U(3, 15)
  std::optional<double> duration_s;     // unset: U(180, 300)
  std::optional<WorldPoint> start;      // unset: uniform over region shrunk by start_margin_m
  Region region;
  double start_margin_m = 80000.0;
  double source_margin_m = 5000.0;
  int max_retries = 100;
  std::uint64_t seed = 0;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;

  /// Throws Error(kInvalidArgument) on the first violated constraint.
  void validate() const;

  /// Geometric down-scaling of region, margins, speed and any fixed start
  /// point. Bearings of the scaled scenario equal those of the original.
  ScenarioConfig scaled(double factor) const;
};

struct Scenario {
  ScenarioConfig config;
  PlatformTrajectory trajectory;
  SourceSet sources;
  MeasurementSet measurements;
  std::vector<int> provenance;  // true source index per bearing; evaluation only

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Number of platform states for a duration/period pair.
std::size_t state_count(double duration_s, double period_s);

double true_bearing(const WorldPoint& platform, const WorldPoint& source);

/// theta + N(0, sigma^2), wrapped to (-pi, pi].
double perturb_bearing(double theta, double sigma, Rng& rng);

PlatformTrajectory generate_trajectory(const ScenarioConfig& config, Rng& rng);

SourceSet place_sources(const ScenarioConfig& config, Rng& rng);

/// Uses independent named sub-streams of config.seed for trajectory, sources
/// and noise, so the result depends on (config, seed) only.
Scenario simulate_scenario(const ScenarioConfig& config);

// ---- scenario file ----------------------------------------------------------

std::string to_json_text(const Scenario& s);
Scenario scenario_from_json_text(const std::string& text);

void write_scenario(const std::filesystem::path& path, const Scenario& s);
Scenario read_scenario(const std::filesystem::path& path);

/// Radians for a stored degree value, chosen so that converting back
/// reproduces the stored value bit-for-bit whenever such a double exists.
double rad_from_stored_deg(double deg);

}  // namespace aoa::sim
