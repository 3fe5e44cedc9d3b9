#include "aoa/geometry.hpp"

namespace aoa {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorKind::kInsufficientData: return "insufficient-data";
    case ErrorKind::kIllConditioned: return "ill-conditioned-geometry";
    case ErrorKind::kOutOfRegion: return "out-of-region";
    case ErrorKind::kOutOfImage: return "out-of-image";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kTrajectoryRejected: return "trajectory-rejected";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

Region Region::shrunk(double margin) const {
  Region r{x_min + margin, x_max - margin, y_min + margin, y_max - margin};
  if (!r.valid()) {
    throw Error(ErrorKind::kInvalidArgument,
                "margin " + std::to_string(margin) + " m leaves an empty region");
  }
  return r;
}

double wrap_angle(double rad) {
  double r = std::remainder(rad, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double bearing(const WorldPoint& from, const WorldPoint& to) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  if (dx == 0.0 && dy == 0.0) {
    throw Error(ErrorKind::kDegenerateGeometry, "bearing between coincident points");
  }
  const double theta = std::atan2(dy, dx);
  // atan2(-0.0, negative) yields -pi; the half-open range excludes it.
  return theta <= -kPi ? kPi : theta;
}

}  // namespace aoa
