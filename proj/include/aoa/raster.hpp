#pragma once

#include <cstdint>
#include <vector>

#include "aoa/geometry.hpp"
#include "aoa/scenario.hpp"

namespace aoa::raster {

/// World <-> pixel mapping. Row 0 is the northern (y_max) edge, column 0 the
/// western (x_min) edge; pixel (row, col) covers
/// [x_min + col*res, x_min + (col+1)*res) x (y_max - (row+1)*res, y_max - row*res].
struct GridSpec {
  Region region;
  double resolution = 250.0;  // meters per pixel
  int width = 800;
  int height = 800;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

  /// Throws unless the region spans an exact whole number of cells.
  static GridSpec from_region(const Region& region, double resolution);
  void validate() const;
};

struct PixelCoord {
  int row = 0;
  int col = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Continuous pixel coordinates; integer values are pixel centers.
struct FractionalPixel {
  double row = 0.0;
  double col = 0.0;
  friend bool operator==(const FractionalPixel&, const FractionalPixel&) = default;
};

template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> data;  // row-major

  Image() = default;
  Image(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  bool contains(int row, int col) const { return row >= 0 && row < height && col >= 0 && col < width; }
  T& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }
  const T& at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Grayscale intensities in [0, 1], background 0.
using InputImage = Image<float>;
/// Binary mask, 0 or 1.
using LabelImage = Image<std::uint8_t>;

PixelCoord world_to_pixel(const WorldPoint& p, const GridSpec& g);
FractionalPixel world_to_fractional(const WorldPoint& p, const GridSpec& g);

/// Cell center for integer input; linear in the fractional coordinates.
WorldPoint pixel_to_world(const FractionalPixel& pc, const GridSpec& g);
inline WorldPoint pixel_to_world(const PixelCoord& pc, const GridSpec& g) {
  return pixel_to_world(FractionalPixel{static_cast<double>(pc.row), static_cast<double>(pc.col)}, g);
}

struct RenderOptions {
  int marker_radius_px = 3;
  bool antialias = false;
};

/// Half-line from `origin` in direction `theta` (radians, CCW from East) to
/// the image border, one pixel per step along the major axis, composed with
/// max(). With antialias the stroke is split over the two nearest pixels.
void draw_df_ray(InputImage& img, const FractionalPixel& origin, double theta, bool antialias = false);
inline void draw_df_ray(InputImage& img, const PixelCoord& origin, double theta, bool antialias = false) {
  draw_df_ray(img, FractionalPixel{static_cast<double>(origin.row), static_cast<double>(origin.col)}, theta,
              antialias);
}

/// Filled disc (dr^2 + dc^2 <= r^2), clipped to the image.
void draw_platform_marker(InputImage& img, const PixelCoord& center, int radius_px);

InputImage render_input(const sim::Scenario& s, const GridSpec& g, const RenderOptions& opts = {});

LabelImage render_label(const sim::SourceSet& sources, const GridSpec& g, int dot_radius_px = 0);

}  // namespace aoa::raster
