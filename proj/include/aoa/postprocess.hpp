#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "aoa/estimators.hpp"
#include "aoa/pgm.hpp"
#include "aoa/raster.hpp"

namespace aoa::post {

using raster::FractionalPixel;
using raster::GridSpec;
using raster::PixelCoord;

using Mask = raster::Image<std::uint8_t>;

struct ProbabilityMap {
  raster::Image<double> values;  // each in [0, 1]
  GridSpec grid;
};

struct Component {
  std::vector<PixelCoord> pixels;  // raster order
  int area = 0;
  FractionalPixel centroid;        // unweighted mean of pixel coordinates
};

struct ComponentSet {
  std::vector<Component> components;  // ordered by first pixel in raster order
  int width = 0;
  int height = 0;
};

enum class Connectivity { kFour = 4, kEight = 8 };

/// Connectivity from its numeric name; throws kInvalidArgument for anything but 4 or 8.
Connectivity connectivity_from_int(int n);

/// mask = value >= threshold.
Mask binarize(const ProbabilityMap& p, double threshold = 0.5);

/// Union-find two-pass labelling.
ComponentSet connected_components(const Mask& mask, Connectivity connectivity = Connectivity::kEight);

/// Probability-weighted centroid of a component.
FractionalPixel weighted_centroid(const Component& c, const ProbabilityMap& p);

/// Drops components with area < min_area and maps centroids to world
/// coordinates. Passing `weights` switches to probability-weighted centroids.
std::vector<est::SourceEstimate> components_to_estimates(const ComponentSet& cs, const GridSpec& g, int min_area = 1,
                                                         const ProbabilityMap* weights = nullptr);

struct DecodeOptions {
  double threshold = 0.5;
  int min_area = 1;
  Connectivity connectivity = Connectivity::kEight;
  bool weighted_centroid = false;
};

/// binarize -> connected_components -> components_to_estimates.
std::vector<est::SourceEstimate> decode(const ProbabilityMap& p, const DecodeOptions& opts = {});

/// Probability = sample / maxval. The grid comes from the image's grid
/// comment, falling back to `fallback`; Error(kFormat) when neither exists or
/// the size disagrees.
ProbabilityMap probability_map_from_pgm(const raster::PgmImage& img, const std::optional<GridSpec>& fallback = {});
ProbabilityMap read_probability_map(const std::filesystem::path& path, const std::optional<GridSpec>& fallback = {});

}  // namespace aoa::post
