#include "aoa/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aoa::raster {

GridSpec GridSpec::from_region(const Region& region, double resolution) {
  if (!region.valid()) throw Error(ErrorKind::kInvalidArgument, "grid region is empty");
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw Error(ErrorKind::kInvalidArgument, "grid resolution must be > 0");
  }
  const double w = region.width() / resolution;
  const double h = region.height() / resolution;
  if (w != std::round(w) || h != std::round(h)) {
    throw Error(ErrorKind::kInvalidArgument, "region extent is not a whole number of " +
                                                 std::to_string(resolution) + " m cells");
  }
  GridSpec g;
  g.region = region;
  g.resolution = resolution;
  g.width = static_cast<int>(w);
  g.height = static_cast<int>(h);
  return g;
}

void GridSpec::validate() const {
  const GridSpec expect = from_region(region, resolution);
  if (expect.width != width || expect.height != height) {
    throw Error(ErrorKind::kInvalidArgument, "grid size does not match region / resolution");
  }
}

PixelCoord world_to_pixel(const WorldPoint& p, const GridSpec& g) {
  if (!p.finite() || !g.region.contains(p)) {
    throw Error(ErrorKind::kOutOfRegion, "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                             ") lies outside the grid region");
  }
  // The closed upper boundary (x_max / y_min) folds into the last cell.
  const int col = std::min(static_cast<int>(std::floor((p.x - g.region.x_min) / g.resolution)), g.width - 1);
  const int row = std::min(static_cast<int>(std::floor((g.region.y_max - p.y) / g.resolution)), g.height - 1);
  return {row, col};
}

FractionalPixel world_to_fractional(const WorldPoint& p, const GridSpec& g) {
  return {(g.region.y_max - p.y) / g.resolution - 0.5, (p.x - g.region.x_min) / g.resolution - 0.5};
}

WorldPoint pixel_to_world(const FractionalPixel& pc, const GridSpec& g) {
  const bool inside = std::isfinite(pc.row) && std::isfinite(pc.col) && pc.row >= -0.5 &&
                      pc.col >= -0.5 && pc.row <= g.height - 0.5 && pc.col <= g.width - 0.5;
  if (!inside) {
    throw Error(ErrorKind::kOutOfImage, "pixel (" + std::to_string(pc.row) + ", " + std::to_string(pc.col) +
                                            ") lies outside the image");
  }
  return {g.region.x_min + (pc.col + 0.5) * g.resolution, g.region.y_max - (pc.row + 0.5) * g.resolution};
}

namespace {

void stamp(InputImage& img, int row, int col, float v) {
  if (img.contains(row, col)) {
    float& px = img.at(row, col);
    px = std::max(px, v);
  }
}

// Marks the pixel(s) at minor-axis position `minor` for one major-axis step.
template <typename Put>
void stroke(double minor, bool antialias, Put put) {
  if (!antialias) {
    put(static_cast<int>(std::floor(minor + 0.5)), 1.0f);
    return;
  }
  const double base = std::floor(minor);
  const auto frac = static_cast<float>(minor - base);
  put(static_cast<int>(base), 1.0f - frac);
  put(static_cast<int>(base) + 1, frac);
}

}  // namespace

void draw_df_ray(InputImage& img, const FractionalPixel& origin, double theta, bool antialias) {
  const double dc = std::cos(theta);
  const double dr = -std::sin(theta);  // rows grow southwards
  if (std::abs(dc) >= std::abs(dr)) {
    const int step = dc > 0.0 ? 1 : -1;
    const double slope = dr / dc;
    const int start = std::clamp(static_cast<int>(std::floor(origin.col + 0.5)), 0, img.width - 1);
    for (int c = start; c >= 0 && c < img.width; c += step) {
      stroke(origin.row + (c - origin.col) * slope, antialias, [&](int r, float v) { stamp(img, r, c, v); });
    }
  } else {
    const int step = dr > 0.0 ? 1 : -1;
    const double slope = dc / dr;
    const int start = std::clamp(static_cast<int>(std::floor(origin.row + 0.5)), 0, img.height - 1);
    for (int r = start; r >= 0 && r < img.height; r += step) {
      stroke(origin.col + (r - origin.row) * slope, antialias, [&](int c, float v) { stamp(img, r, c, v); });
    }
  }
}

void draw_platform_marker(InputImage& img, const PixelCoord& center, int radius_px) {
  if (radius_px < 0) throw Error(ErrorKind::kInvalidArgument, "marker radius must be >= 0");
  const int r2 = radius_px * radius_px;
  for (int dr = -radius_px; dr <= radius_px; ++dr) {
    for (int dc = -radius_px; dc <= radius_px; ++dc) {
      if (dr * dr + dc * dc <= r2) stamp(img, center.row + dr, center.col + dc, 1.0f);
    }
  }
}

InputImage render_input(const sim::Scenario& s, const GridSpec& g, const RenderOptions& opts) {
  g.validate();
  InputImage img(g.width, g.height, 0.0f);
  for (const auto& st : s.trajectory.states) {
    draw_platform_marker(img, world_to_pixel(st.position, g), opts.marker_radius_px);
  }
  for (const auto& b : s.measurements.bearings) {
    world_to_pixel(b.platform, g);  // region check
    draw_df_ray(img, world_to_fractional(b.platform, g), b.theta_meas, opts.antialias);
  }
  return img;
}

LabelImage render_label(const sim::SourceSet& sources, const GridSpec& g, int dot_radius_px) {
  g.validate();
  if (dot_radius_px < 0) throw Error(ErrorKind::kInvalidArgument, "dot radius must be >= 0");
  LabelImage img(g.width, g.height, 0);
  const int r2 = dot_radius_px * dot_radius_px;
  for (const auto& p : sources.locations) {
    const PixelCoord c = world_to_pixel(p, g);
    for (int dr = -dot_radius_px; dr <= dot_radius_px; ++dr) {
      for (int dc = -dot_radius_px; dc <= dot_radius_px; ++dc) {
        if (dr * dr + dc * dc <= r2 && img.contains(c.row + dr, c.col + dc)) img.at(c.row + dr, c.col + dc) = 1;
      }
    }
  }
  return img;
}

}  // namespace aoa::raster
