#include "aoa/postprocess.hpp"

#include <numeric>
#include <string>

namespace aoa::post {

Connectivity connectivity_from_int(int n) {
  if (n == 4) return Connectivity::kFour;
  if (n == 8) return Connectivity::kEight;
  throw Error(ErrorKind::kInvalidArgument, "connectivity must be 4 or 8, got " + std::to_string(n));
}

Mask binarize(const ProbabilityMap& p, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "threshold must be in [0, 1], got " + std::to_string(threshold));
  }
  Mask mask(p.values.width, p.values.height, 0);
  for (std::size_t i = 0; i < p.values.data.size(); ++i) mask.data[i] = p.values.data[i] >= threshold ? 1 : 0;
  return mask;
}

namespace {

class DisjointSet {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    // Smaller label wins so roots follow raster order.
    if (a < b) parent_[b] = a;
    else if (b < a) parent_[a] = b;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

ComponentSet connected_components(const Mask& mask, Connectivity connectivity) {
  const int w = mask.width;
  const int h = mask.height;
  std::vector<int> labels(mask.data.size(), -1);
  DisjointSet sets;

  // Already-visited neighbours: W, NW, N, NE (the diagonals only for 8-connectivity).
  const int offsets8[4][2] = {{0, -1}, {-1, -1}, {-1, 0}, {-1, 1}};
  const int offsets4[2][2] = {{0, -1}, {-1, 0}};

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      int label = -1;
      const auto visit = [&](int dr, int dc) {
        const int rr = r + dr;
        const int cc = c + dc;
        if (!mask.contains(rr, cc)) return;
        const int other = labels[static_cast<std::size_t>(rr) * w + cc];
        if (other < 0) return;
        if (label < 0) label = other;
        else sets.unite(label, other);
      };
      if (connectivity == Connectivity::kEight) {
        for (const auto& o : offsets8) visit(o[0], o[1]);
      } else {
        for (const auto& o : offsets4) visit(o[0], o[1]);
      }
      labels[static_cast<std::size_t>(r) * w + c] = label < 0 ? sets.make() : label;
    }
  }

  ComponentSet out;
  out.width = w;
  out.height = h;
  std::vector<int> slot;  // provisional root -> component index
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int label = labels[static_cast<std::size_t>(r) * w + c];
      if (label < 0) continue;
      const int root = sets.find(label);
      if (static_cast<std::size_t>(root) >= slot.size()) slot.resize(static_cast<std::size_t>(root) + 1, -1);
      if (slot[static_cast<std::size_t>(root)] < 0) {
        slot[static_cast<std::size_t>(root)] = static_cast<int>(out.components.size());
        out.components.emplace_back();
      }
      out.components[static_cast<std::size_t>(slot[static_cast<std::size_t>(root)])].pixels.push_back({r, c});
    }
  }
  for (auto& comp : out.components) {
    comp.area = static_cast<int>(comp.pixels.size());
    double sr = 0.0;
    double sc = 0.0;
    for (const auto& p : comp.pixels) {
      sr += p.row;
      sc += p.col;
    }
    comp.centroid = {sr / comp.area, sc / comp.area};
  }
  return out;
}

FractionalPixel weighted_centroid(const Component& c, const ProbabilityMap& p) {
  double sw = 0.0;
  double sr = 0.0;
  double sc = 0.0;
  for (const auto& px : c.pixels) {
    const double v = p.values.at(px.row, px.col);
    sw += v;
    sr += v * px.row;
    sc += v * px.col;
  }
  if (!(sw > 0.0)) return c.centroid;
  return {sr / sw, sc / sw};
}

std::vector<est::SourceEstimate> components_to_estimates(const ComponentSet& cs, const GridSpec& g, int min_area,
                                                         const ProbabilityMap* weights) {
  if (cs.width != g.width || cs.height != g.height) {
    throw Error(ErrorKind::kInvalidArgument, "component set size does not match the grid");
  }
  std::vector<est::SourceEstimate> out;
  for (const auto& comp : cs.components) {
    if (comp.area < min_area) continue;
    est::SourceEstimate e;
    e.method = est::Method::kSegnet;
    e.position = raster::pixel_to_world(weights ? weighted_centroid(comp, *weights) : comp.centroid, g);
    e.diagnostics.rows_used = comp.area;
    out.push_back(e);
  }
  return out;
}

std::vector<est::SourceEstimate> decode(const ProbabilityMap& p, const DecodeOptions& opts) {
  if (opts.min_area < 1) throw Error(ErrorKind::kInvalidArgument, "min_area must be >= 1");
  const ComponentSet cs = connected_components(binarize(p, opts.threshold), opts.connectivity);
  return components_to_estimates(cs, p.grid, opts.min_area, opts.weighted_centroid ? &p : nullptr);
}

ProbabilityMap probability_map_from_pgm(const raster::PgmImage& img, const std::optional<GridSpec>& fallback) {
  std::optional<GridSpec> grid = raster::find_grid(img);
  if (!grid) grid = fallback;
  if (!grid) throw Error(ErrorKind::kFormat, "probability map carries no grid comment and no grid was given");
  if (grid->width != img.width || grid->height != img.height) {
    throw Error(ErrorKind::kFormat, "probability map is " + std::to_string(img.width) + "x" +
                                        std::to_string(img.height) + " but its grid is " +
                                        std::to_string(grid->width) + "x" + std::to_string(grid->height));
  }
  ProbabilityMap p;
  p.grid = *grid;
  p.values = raster::Image<double>(img.width, img.height, 0.0);
  const double maxval = img.maxval;
  for (std::size_t i = 0; i < img.samples.size(); ++i) p.values.data[i] = img.samples[i] / maxval;
  return p;
}

ProbabilityMap read_probability_map(const std::filesystem::path& path, const std::optional<GridSpec>& fallback) {
  return probability_map_from_pgm(raster::read_pgm(path), fallback);
}

}  // namespace aoa::post
