#pragma once

// Shared by the unit tests and the acceptance binary. The oracles here are
// deliberately naive re-implementations, kept independent of the library code
// they check.

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "aoa/geometry.hpp"
#include "aoa/raster.hpp"
#include "aoa/scenario.hpp"

namespace aoa::testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("aoa_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

using Partition = std::vector<std::vector<raster::PixelCoord>>;

/// BFS flood fill. Components are listed by their first pixel in raster order,
/// pixels within a component in raster order.
inline Partition flood_fill_partition(const raster::Image<std::uint8_t>& mask, bool eight) {
  std::vector<char> seen(mask.data.size(), 0);
  Partition out;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(r, c) || seen[static_cast<std::size_t>(r) * mask.width + c]) continue;
      std::vector<raster::PixelCoord> comp;
      std::deque<raster::PixelCoord> queue{{r, c}};
      seen[static_cast<std::size_t>(r) * mask.width + c] = 1;
      while (!queue.empty()) {
        const auto p = queue.front();
        queue.pop_front();
        comp.push_back(p);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            if (!eight && dr != 0 && dc != 0) continue;
            const int rr = p.row + dr;
            const int cc = p.col + dc;
            if (!mask.contains(rr, cc) || !mask.at(rr, cc)) continue;
            char& s = seen[static_cast<std::size_t>(rr) * mask.width + cc];
            if (s) continue;
            s = 1;
            queue.push_back({rr, cc});
          }
        }
      }
      std::sort(comp.begin(), comp.end(),
                [](const auto& a, const auto& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
      out.push_back(std::move(comp));
    }
  }
  return out;
}

/// Minimum total squared distance over every injective assignment of the
/// smaller side, summed in truth-index order.
inline double brute_force_assignment_cost(const std::vector<WorldPoint>& truth, const std::vector<WorldPoint>& est) {
  const std::size_t s = truth.size();
  const std::size_t e = est.size();
  if (s == 0 || e == 0) return 0.0;
  const std::size_t k = std::min(s, e);
  const auto sq = [](const WorldPoint& a, const WorldPoint& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
  };
  double best = std::numeric_limits<double>::infinity();
  if (s <= e) {
    std::vector<std::size_t> perm(e);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double cost = 0.0;
      for (std::size_t i = 0; i < k; ++i) cost += sq(truth[i], est[perm[i]]);
      best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<std::size_t> perm(s);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      // Estimate j takes truth perm[j]; sum in truth order.
      std::vector<std::pair<std::size_t, double>> pairs;
      for (std::size_t j = 0; j < k; ++j) pairs.emplace_back(perm[j], sq(truth[perm[j]], est[j]));
      std::sort(pairs.begin(), pairs.end());
      double cost = 0.0;
      for (const auto& p : pairs) cost += p.second;
      best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return best;
}

/// Sum of squared wrapped bearing residuals, written from scratch.
inline double oracle_ml_cost(const WorldPoint& c, const sim::MeasurementSet& m) {
  double sum = 0.0;
  for (const auto& b : m.bearings) {
    const double dx = c.x - b.platform.x;
    const double dy = c.y - b.platform.y;
    if (dx == 0.0 && dy == 0.0) return std::numeric_limits<double>::infinity();
    double r = std::fmod(b.theta_meas - std::atan2(dy, dx), 2.0 * kPi);
    if (r > kPi) r -= 2.0 * kPi;
    if (r <= -kPi) r += 2.0 * kPi;
    sum += r * r;
  }
  return sum;
}

/// Exhaustive minimum of the ML cost: a coarse grid over the region, then
/// successively finer grids around the best coarse cells. With few bearings
/// the coarse winner can sit in the wrong valley, so several are refined.
inline WorldPoint grid_search_ml(const sim::MeasurementSet& m, const Region& region, double coarse_step_m = 1000.0,
                                 double fine_step_m = 10.0, int candidates = 10) {
  struct Hit {
    double cost;
    WorldPoint p;
  };
  const auto scan = [&](double cx, double cy, double half, double step, std::vector<Hit>& hits) {
    const int n = static_cast<int>(std::floor(half / step + 1e-9));
    for (int i = -n; i <= n; ++i) {
      for (int j = -n; j <= n; ++j) {
        const WorldPoint p{cx + i * step, cy + j * step};
        if (region.contains(p)) hits.push_back({oracle_ml_cost(p, m), p});
      }
    }
  };
  const auto best_k = [](std::vector<Hit>& hits, std::size_t k) {
    k = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(),
                      [](const Hit& a, const Hit& b) { return a.cost < b.cost; });
    hits.resize(k);
  };
  std::vector<Hit> hits;
  const WorldPoint c{(region.x_min + region.x_max) / 2, (region.y_min + region.y_max) / 2};
  scan(c.x, c.y, std::max(region.x_max - region.x_min, region.y_max - region.y_min) / 2, coarse_step_m, hits);
  best_k(hits, static_cast<std::size_t>(candidates));
  // Each level scans +-2 cells of the previous step at a tenth of it.
  for (double step = coarse_step_m / 10; step >= fine_step_m * (1 - 1e-9); step /= 10) {
    std::vector<Hit> next;
    for (const auto& h : hits) scan(h.p.x, h.p.y, 20 * step, step, next);
    best_k(next, static_cast<std::size_t>(candidates));
    hits = std::move(next);
  }
  return hits.front().p;
}

/// Smallest pairwise distance of a point set (infinity for fewer than two).
inline double min_separation(const std::vector<WorldPoint>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, distance(pts[i], pts[j]));
  }
  return best;
}

}  // namespace aoa::testing
