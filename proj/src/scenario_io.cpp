#include <cmath>
#include <fstream>
#include <sstream>

#include "aoa/scenario.hpp"
#include "json.hpp"

namespace aoa::sim {

using nlohmann::ordered_json;

double rad_from_stored_deg(double deg) {
  double r = deg_to_rad(deg);
  if (rad_to_deg(r) == deg || !std::isfinite(deg)) return r;
  // rad_to_deg is monotone, so the matching double (if any) is a few ulps away.
  double up = r;
  double down = r;
  for (int i = 0; i < 8; ++i) {
    up = std::nextafter(up, INFINITY);
    down = std::nextafter(down, -INFINITY);
    if (rad_to_deg(up) == deg) return up;
    if (rad_to_deg(down) == deg) return down;
  }
  return r;
}

namespace {

ordered_json optional_or_random(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json("random");
}

std::optional<double> read_optional(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_string()) {
    if (v.get<std::string>() != "random") {
      throw Error(ErrorKind::kFormat, std::string("field '") + key + "' must be a number or \"random\"");
    }
    return std::nullopt;
  }
  return v.get<double>();
}

ordered_json config_to_json(const ScenarioConfig& c) {
  ordered_json j;
  j["sigma_deg"] = c.sigma_deg;
  j["num_sources"] = c.num_sources;
  j["max_sources"] = c.max_sources;
  j["speed"] = c.speed;
  j["heading_deg"] = optional_or_random(c.heading_deg);
  j["period_s"] = optional_or_random(c.period_s);
  j["duration_s"] = optional_or_random(c.duration_s);
  j["start"] = c.start ? ordered_json::array({c.start->x, c.start->y}) : ordered_json("random");
  j["region"] = {{"x_min", c.region.x_min}, {"x_max", c.region.x_max},
                 {"y_min", c.region.y_min}, {"y_max", c.region.y_max}};
  j["start_margin_m"] = c.start_margin_m;
  j["source_margin_m"] = c.source_margin_m;
  j["max_retries"] = c.max_retries;
  j["seed"] = c.seed;
  return j;
}

ScenarioConfig config_from_json(const ordered_json& j) {
  ScenarioConfig c;
  c.sigma_deg = j.at("sigma_deg").get<double>();
  c.num_sources = j.at("num_sources").get<int>();
  c.max_sources = j.value("max_sources", 5);
  c.speed = j.at("speed").get<double>();
  c.heading_deg = read_optional(j, "heading_deg");
  c.period_s = read_optional(j, "period_s");
  c.duration_s = read_optional(j, "duration_s");
  if (j.contains("start") && j["start"].is_array()) {
    c.start = WorldPoint{j["start"].at(0).get<double>(), j["start"].at(1).get<double>()};
  }
  const auto& r = j.at("region");
  c.region = {r.at("x_min").get<double>(), r.at("x_max").get<double>(), r.at("y_min").get<double>(),
              r.at("y_max").get<double>()};
  c.start_margin_m = j.value("start_margin_m", 80000.0);
  c.source_margin_m = j.value("source_margin_m", 5000.0);
  c.max_retries = j.value("max_retries", 100);
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

std::string to_json_text(const Scenario& s) {
  ordered_json j;
  j["config"] = config_to_json(s.config);
  j["resolved"] = {{"heading_deg", s.trajectory.heading_deg},
                   {"period_s", s.trajectory.period_s},
                   {"duration_s", s.trajectory.duration_s},
                   {"speed", s.trajectory.speed}};

  auto traj = ordered_json::array();
  for (const auto& st : s.trajectory.states) traj.push_back({st.t, st.position.x, st.position.y});
  j["trajectory"] = std::move(traj);

  auto sources = ordered_json::array();
  for (const auto& p : s.sources.locations) sources.push_back({p.x, p.y});
  j["sources"] = std::move(sources);

  auto bearings = ordered_json::array();
  for (const auto& b : s.measurements.bearings) {
    bearings.push_back({b.index, b.t, b.platform.x, b.platform.y, rad_to_deg(b.theta_meas),
                        rad_to_deg(b.sigma)});
  }
  j["bearings"] = std::move(bearings);
  j["provenance"] = s.provenance;
  return j.dump(1) + "\n";
}

Scenario scenario_from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kFormat, std::string("scenario JSON: ") + e.what());
  }
  try {
    Scenario s;
    s.config = config_from_json(j.at("config"));

    const auto& resolved = j.at("resolved");
    s.trajectory.heading_deg = resolved.at("heading_deg").get<double>();
    s.trajectory.period_s = resolved.at("period_s").get<double>();
    s.trajectory.duration_s = resolved.at("duration_s").get<double>();
    s.trajectory.speed = resolved.at("speed").get<double>();
    for (const auto& row : j.at("trajectory")) {
      s.trajectory.states.push_back({row.at(0).get<double>(), {row.at(1).get<double>(), row.at(2).get<double>()}});
    }
    for (const auto& row : j.at("sources")) {
      s.sources.locations.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
    }
    if (j.contains("provenance")) s.provenance = j["provenance"].get<std::vector<int>>();

    const auto& rows = j.at("bearings");
    if (!s.provenance.empty() && s.provenance.size() != rows.size()) {
      throw Error(ErrorKind::kFormat, "provenance length differs from bearing count");
    }
    s.measurements.bearings.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      AoABearing b;
      b.index = row.at(0).get<int>();
      b.t = row.at(1).get<double>();
      b.platform = {row.at(2).get<double>(), row.at(3).get<double>()};
      b.theta_meas = rad_from_stored_deg(row.at(4).get<double>());
      b.sigma = rad_from_stored_deg(row.at(5).get<double>());
      b.theta_true = b.theta_meas;
      if (!s.provenance.empty()) {
        const int src = s.provenance[i];
        if (src < 0 || static_cast<std::size_t>(src) >= s.sources.size()) {
          throw Error(ErrorKind::kFormat, "provenance index out of range at bearing " + std::to_string(i));
        }
        b.theta_true = true_bearing(b.platform, s.sources.locations[static_cast<std::size_t>(src)]);
      }
      s.measurements.bearings.push_back(b);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("scenario JSON: ") + e.what());
  }
}

void write_scenario(const std::filesystem::path& path, const Scenario& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out << to_json_text(s);
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

Scenario read_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json_text(buf.str());
}

}  // namespace aoa::sim
