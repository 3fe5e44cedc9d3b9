#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "aoa/geometry.hpp"
#include "aoa/scenario.hpp"

namespace aoa::est {

enum class Method { kPls, kWive, kPsoMl, kSegnet };

std::string_view to_string(Method m);
/// Accepts "pls", "wive", "pso-ml", "segnet"; throws kInvalidArgument otherwise.
Method method_from_string(std::string_view name);

struct Diagnostics {
  std::optional<double> residual_norm;
  std::optional<int> iterations;
  std::optional<double> cost;
  std::optional<double> initial_best_cost;  // PSO: best cost among initial particles
  int rows_used = 0;
  int rows_excluded = 0;  // bearings dropped by the tan singularity guard
  bool left_region = false;  // WIVE: some iterate was clamped into the bounds
};

struct SourceEstimate {
  WorldPoint position;
  Method method = Method::kPls;
  Diagnostics diagnostics;
};

/// Row layout of the pseudo-linear system.
///  kTangent: [tan(theta), -1] u = x tan(theta) - y     (rows with |cos| < 1e-6 dropped)
///  kSinCos:  [sin(theta), -cos(theta)] u = x sin(theta) - y cos(theta)
enum class RowForm { kTangent, kSinCos };

/// Per-bearing weights used by WIVE.
///  kInverse: 1 / (R^2 sigma^2), favouring close, low-noise bearings (default)
///  kLiteral: R^2 sigma^2, kept for comparison studies
enum class WiveWeighting { kInverse, kLiteral };

inline constexpr double kTanGuard = 1e-6;
inline constexpr double kMaxCondition = 1e12;

/// A u = b in coordinates relative to `origin` (the mean platform position);
/// the estimate in world coordinates is origin + u.
struct PseudoLinearSystem {
  Eigen::MatrixX2d A;
  Eigen::VectorXd b;
  std::vector<std::size_t> rows;  // bearing index of each row
  WorldPoint origin;
  int excluded = 0;
};

struct IvSystem {
  Eigen::MatrixX2d G;
  Eigen::VectorXd weights;
  Eigen::VectorXd ranges;
};

struct PlsOptions {
  RowForm row_form = RowForm::kTangent;
};

/// Defaults: sin/cos rows, sign-aligned instruments, re-linearized at the
/// latest estimate until the update drops below tolerance_m. The single-pass
/// tangent-row variant is {kTangent, kInverse, 1, 0.0, false}.
struct WiveOptions {
  RowForm row_form = RowForm::kSinCos;
  WiveWeighting weighting = WiveWeighting::kInverse;
  int max_iterations = 20;
  double tolerance_m = 1e-3;
  // Flip instrument rows whose predicted bearing points away from the
  // measured one (reference behind the platform, or a tan sign change
  // across +-90 deg).
  bool align_instruments = true;
  // When set, every iterate is clamped into the region. Weakly observable
  // geometries otherwise let the re-linearization drift far outside it.
  std::optional<Region> bounds;
};

PseudoLinearSystem build_pseudo_linear_system(const sim::MeasurementSet& m, RowForm form);

/// Instrumental-variable matrix and weights for the rows of `sys`, built
/// from bearings and ranges predicted at `reference` (world coordinates).
IvSystem build_iv_system(const sim::MeasurementSet& m, const PseudoLinearSystem& sys,
                         const WorldPoint& reference, const WiveOptions& opts);

SourceEstimate pls_estimate(const sim::MeasurementSet& m, const PlsOptions& opts = {});

SourceEstimate wive_estimate(const sim::MeasurementSet& m, const WiveOptions& opts = {});

/// Sum of squared wrapped bearing residuals at `candidate`.
double ml_cost(const WorldPoint& candidate, const sim::MeasurementSet& m);

struct PsoConfig {
  int particles = 50;
  int iterations = 200;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  double velocity_clamp = 0.2;  // fraction of the bounds span per axis
  Region bounds;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Global-best PSO over cfg.bounds minimizing ml_cost.
SourceEstimate pso_ml_estimate(const sim::MeasurementSet& m, const PsoConfig& cfg);

}  // namespace aoa::est
