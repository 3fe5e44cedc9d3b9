#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace aoa {

enum class ErrorKind {
  kDegenerateGeometry,
  kInsufficientData,
  kIllConditioned,
  kOutOfRegion,
  kOutOfImage,
  kInvalidArgument,
  kTrajectoryRejected,
  kFormat,
  kIo,
};

const char* to_string(ErrorKind kind);

// All library failures surface as aoa::Error; kind() lets callers (CLI exit
// codes, Monte-Carlo failure counters) branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// East/North coordinates in meters.
struct WorldPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const WorldPoint&, const WorldPoint&) = default;
  WorldPoint operator+(const WorldPoint& o) const { return {x + o.x, y + o.y}; }
  WorldPoint operator-(const WorldPoint& o) const { return {x - o.x, y - o.y}; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(const WorldPoint& a, const WorldPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double squared_distance(const WorldPoint& a, const WorldPoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Axis-aligned rectangle in meters.
struct Region {
  double x_min = -100000.0;
  double x_max = 100000.0;
  double y_min = -100000.0;
  double y_max = 100000.0;

  friend bool operator==(const Region&, const Region&) = default;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool valid() const {
    return std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
           std::isfinite(y_max) && x_min < x_max && y_min < y_max;
  }
  bool contains(const WorldPoint& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  /// Shrinks every side by `margin` meters; throws if nothing is left.
  Region shrunk(double margin) const;

  /// Square region centered on the origin with the given half extent.
  static Region centered(double half_extent_m) {
    return {-half_extent_m, half_extent_m, -half_extent_m, half_extent_m};
  }
};

constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

/// Wraps an angle to (-pi, pi].
double wrap_angle(double rad);

/// Four-quadrant bearing of `to` seen from `from`, in (-pi, pi], measured
/// counter-clockwise from +x (East).
double bearing(const WorldPoint& from, const WorldPoint& to);

}  // namespace aoa
