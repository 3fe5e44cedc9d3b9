#include "aoa/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "aoa/rng.hpp"

namespace aoa::est {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kPls: return "pls";
    case Method::kWive: return "wive";
    case Method::kPsoMl: return "pso-ml";
    case Method::kSegnet: return "segnet";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  if (name == "pls") return Method::kPls;
  if (name == "wive") return Method::kWive;
  if (name == "pso-ml") return Method::kPsoMl;
  if (name == "segnet") return Method::kSegnet;
  throw Error(ErrorKind::kInvalidArgument, "unknown method '" + std::string(name) + "'");
}

namespace {

WorldPoint mean_platform(const sim::MeasurementSet& m) {
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& b : m.bearings) {
    sx += b.platform.x;
    sy += b.platform.y;
  }
  const double n = static_cast<double>(m.size());
  return {sx / n, sy / n};
}

// Solves M u = rhs for a 2x2 system after checking the singular-value ratio.
Eigen::Vector2d solve_checked(const Eigen::Matrix2d& M, const Eigen::Vector2d& rhs, const char* what) {
  if (!M.allFinite() || !rhs.allFinite()) {
    throw Error(ErrorKind::kIllConditioned, std::string(what) + " has non-finite entries");
  }
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(M);
  const auto sv = svd.singularValues();
  if (!(sv(1) > 0.0) || sv(0) / sv(1) > kMaxCondition) {
    throw Error(ErrorKind::kIllConditioned, std::string(what) + " is singular or ill-conditioned");
  }
  return M.fullPivLu().solve(rhs);
}

}  // namespace

PseudoLinearSystem build_pseudo_linear_system(const sim::MeasurementSet& m, RowForm form) {
  PseudoLinearSystem sys;
  if (m.empty()) return sys;
  sys.origin = mean_platform(m);

  std::vector<std::size_t> rows;
  rows.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double c = std::cos(m.bearings[i].theta_meas);
    if (form == RowForm::kTangent && std::abs(c) < kTanGuard) {
      ++sys.excluded;
      continue;
    }
    rows.push_back(i);
  }

  sys.A.resize(static_cast<Eigen::Index>(rows.size()), 2);
  sys.b.resize(static_cast<Eigen::Index>(rows.size()));
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(rows.size()); ++r) {
    const auto& brg = m.bearings[rows[static_cast<std::size_t>(r)]];
    const double xn = brg.platform.x - sys.origin.x;
    const double yn = brg.platform.y - sys.origin.y;
    if (form == RowForm::kTangent) {
      const double t = std::tan(brg.theta_meas);
      sys.A.row(r) << t, -1.0;
      sys.b(r) = xn * t - yn;
    } else {
      const double s = std::sin(brg.theta_meas);
      const double c = std::cos(brg.theta_meas);
      sys.A.row(r) << s, -c;
      sys.b(r) = xn * s - yn * c;
    }
  }
  sys.rows = std::move(rows);
  return sys;
}

IvSystem build_iv_system(const sim::MeasurementSet& m, const PseudoLinearSystem& sys,
                         const WorldPoint& reference, const WiveOptions& opts) {
  const auto n = static_cast<Eigen::Index>(sys.rows.size());
  IvSystem iv;
  iv.G.resize(n, 2);
  iv.weights.resize(n);
  iv.ranges.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& brg = m.bearings[sys.rows[static_cast<std::size_t>(r)]];
    const double range = distance(reference, brg.platform);
    if (!(range > 0.0)) {
      throw Error(ErrorKind::kDegenerateGeometry, "reference estimate coincides with a platform position");
    }
    const double theta_hat = bearing(brg.platform, reference);
    if (opts.row_form == RowForm::kTangent) {
      iv.G.row(r) << std::tan(theta_hat), -1.0;
    } else {
      iv.G.row(r) << std::sin(theta_hat), -std::cos(theta_hat);
    }
    if (opts.align_instruments && iv.G.row(r).dot(sys.A.row(r)) < 0.0) iv.G.row(r) *= -1.0;
    const double rs2 = range * range * brg.sigma * brg.sigma;
    iv.ranges(r) = range;
    iv.weights(r) = opts.weighting == WiveWeighting::kInverse ? 1.0 / rs2 : rs2;
  }
  return iv;
}

SourceEstimate pls_estimate(const sim::MeasurementSet& m, const PlsOptions& opts) {
  PseudoLinearSystem sys = build_pseudo_linear_system(m, opts.row_form);
  if (sys.rows.size() < 2) {
    throw Error(ErrorKind::kInsufficientData, "PLS needs at least 2 usable bearings, got " +
                                                  std::to_string(sys.rows.size()));
  }
  const Eigen::Matrix2d normal = sys.A.transpose() * sys.A;
  const Eigen::Vector2d rhs = sys.A.transpose() * sys.b;
  const Eigen::Vector2d u = solve_checked(normal, rhs, "A^T A");

  SourceEstimate est;
  est.method = Method::kPls;
  est.position = {sys.origin.x + u(0), sys.origin.y + u(1)};
  est.diagnostics.residual_norm = (sys.A * u - sys.b).norm();
  est.diagnostics.rows_used = static_cast<int>(sys.rows.size());
  est.diagnostics.rows_excluded = sys.excluded;
  return est;
}

SourceEstimate wive_estimate(const sim::MeasurementSet& m, const WiveOptions& opts) {
  if (opts.max_iterations < 1) {
    throw Error(ErrorKind::kInvalidArgument, "WIVE needs at least 1 iteration");
  }
  const SourceEstimate pls = pls_estimate(m, {opts.row_form});
  const PseudoLinearSystem sys = build_pseudo_linear_system(m, opts.row_form);

  SourceEstimate est;
  WorldPoint reference = pls.position;
  Eigen::Vector2d u = Eigen::Vector2d::Zero();
  int passes = 0;
  while (passes < opts.max_iterations) {
    const IvSystem iv = build_iv_system(m, sys, reference, opts);
    // Uniform rescaling of W leaves the solution unchanged and keeps the
    // products near unity.
    const double scale = iv.weights.maxCoeff();
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw Error(ErrorKind::kIllConditioned, "WIVE weights are not positive and finite");
    }
    const Eigen::VectorXd w = iv.weights / scale;
    const Eigen::MatrixX2d gw = w.asDiagonal() * iv.G;
    const Eigen::Matrix2d lhs = gw.transpose() * sys.A;
    const Eigen::Vector2d rhs = gw.transpose() * sys.b;
    u = solve_checked(lhs, rhs, "G^T W A");
    ++passes;

    WorldPoint next{sys.origin.x + u(0), sys.origin.y + u(1)};
    if (opts.bounds && !opts.bounds->contains(next)) {
      next = {std::clamp(next.x, opts.bounds->x_min, opts.bounds->x_max),
              std::clamp(next.y, opts.bounds->y_min, opts.bounds->y_max)};
      est.diagnostics.left_region = true;
    }
    const double step = distance(next, reference);
    reference = next;
    if (step <= opts.tolerance_m) break;
  }

  est.method = Method::kWive;
  est.position = reference;
  const Eigen::Vector2d kept{reference.x - sys.origin.x, reference.y - sys.origin.y};
  est.diagnostics.residual_norm = (sys.A * kept - sys.b).norm();
  est.diagnostics.iterations = passes;
  est.diagnostics.rows_used = static_cast<int>(sys.rows.size());
  est.diagnostics.rows_excluded = sys.excluded;
  return est;
}

namespace {

// ml_cost without the coincidence check; coincident candidates cost +inf.
double ml_cost_unchecked(double cx, double cy, const sim::MeasurementSet& m) {
  double sum = 0.0;
  for (const auto& b : m.bearings) {
    const double dx = cx - b.platform.x;
    const double dy = cy - b.platform.y;
    if (dx == 0.0 && dy == 0.0) return std::numeric_limits<double>::infinity();
    const double r = wrap_angle(b.theta_meas - std::atan2(dy, dx));
    sum += r * r;
  }
  return sum;
}

}  // namespace

double ml_cost(const WorldPoint& candidate, const sim::MeasurementSet& m) {
  double sum = 0.0;
  for (const auto& b : m.bearings) {
    const double r = wrap_angle(b.theta_meas - bearing(b.platform, candidate));
    sum += r * r;
  }
  return sum;
}

void PsoConfig::validate() const {
  if (particles < 2) throw Error(ErrorKind::kInvalidArgument, "PSO needs at least 2 particles");
  if (iterations < 1) throw Error(ErrorKind::kInvalidArgument, "PSO needs at least 1 iteration");
  if (!(inertia > 0.0 && inertia < 1.0)) throw Error(ErrorKind::kInvalidArgument, "PSO inertia must be in (0, 1)");
  if (!(cognitive >= 0.0) || !(social >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "PSO acceleration coefficients must be >= 0");
  }
  if (!(velocity_clamp > 0.0)) throw Error(ErrorKind::kInvalidArgument, "PSO velocity clamp must be > 0");
  if (!bounds.valid()) throw Error(ErrorKind::kInvalidArgument, "PSO bounds are empty");
}

SourceEstimate pso_ml_estimate(const sim::MeasurementSet& m, const PsoConfig& cfg) {
  cfg.validate();
  if (m.size() < 2) {
    throw Error(ErrorKind::kInsufficientData, "PSO-ML needs at least 2 bearings");
  }
  const std::size_t count = static_cast<std::size_t>(cfg.particles);
  const double lo[2] = {cfg.bounds.x_min, cfg.bounds.y_min};
  const double hi[2] = {cfg.bounds.x_max, cfg.bounds.y_max};
  const double vmax[2] = {cfg.velocity_clamp * (hi[0] - lo[0]), cfg.velocity_clamp * (hi[1] - lo[1])};

  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  struct Particle {
    double x[2];
    double v[2];
    double best[2];
    double best_cost;
  };
  std::vector<Particle> swarm(count);
  double gbest[2] = {0.0, 0.0};
  double gbest_cost = std::numeric_limits<double>::infinity();

  for (auto& p : swarm) {
    for (int d = 0; d < 2; ++d) {
      p.x[d] = lo[d] + (hi[d] - lo[d]) * unit(rng);
      p.v[d] = vmax[d] * (2.0 * unit(rng) - 1.0);
      p.best[d] = p.x[d];
    }
    p.best_cost = ml_cost_unchecked(p.x[0], p.x[1], m);
    if (p.best_cost < gbest_cost) {
      gbest_cost = p.best_cost;
      gbest[0] = p.x[0];
      gbest[1] = p.x[1];
    }
  }
  const double initial_best = gbest_cost;

  for (int it = 0; it < cfg.iterations; ++it) {
    for (auto& p : swarm) {
      for (int d = 0; d < 2; ++d) {
        const double r1 = unit(rng);
        const double r2 = unit(rng);
        double v = cfg.inertia * p.v[d] + cfg.cognitive * r1 * (p.best[d] - p.x[d]) +
                   cfg.social * r2 * (gbest[d] - p.x[d]);
        v = std::clamp(v, -vmax[d], vmax[d]);
        p.v[d] = v;
        p.x[d] = std::clamp(p.x[d] + v, lo[d], hi[d]);
      }
      const double c = ml_cost_unchecked(p.x[0], p.x[1], m);
      if (c < p.best_cost) {
        p.best_cost = c;
        p.best[0] = p.x[0];
        p.best[1] = p.x[1];
      }
    }
    // Synchronous update in particle order keeps the reduction deterministic.
    for (const auto& p : swarm) {
      if (p.best_cost < gbest_cost) {
        gbest_cost = p.best_cost;
        gbest[0] = p.best[0];
        gbest[1] = p.best[1];
      }
    }
  }

  SourceEstimate est;
  est.method = Method::kPsoMl;
  est.position = {gbest[0], gbest[1]};
  est.diagnostics.cost = gbest_cost;
  est.diagnostics.initial_best_cost = initial_best;
  est.diagnostics.iterations = cfg.iterations;
  est.diagnostics.rows_used = static_cast<int>(m.size());
  return est;
}

}  // namespace aoa::est
