#include "mvgd/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace mvgd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double box_extent(const BoxRegion& region) {
  return (region.upper - region.lower).cwiseAbs().maxCoeff();
}

struct PgaResult {
  Vector z;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Projected gradient ascent on f(z) = z'Hz + g'z with Armijo backtracking.
// Monotone in f, so a feasible start is never made worse.
PgaResult pga(const Matrix& h, const Vector& g, const BoxRegion& region,
              const SolveConfig& cfg, Vector z0) {
  constexpr double kArmijo = 1e-4;
  const double tol = cfg.grad_tol * std::max(1.0, box_extent(region));

  auto value = [&](const Vector& z) { return z.dot(h * z) + g.dot(z); };

  PgaResult res;
  res.z = project_box(std::move(z0), region);
  res.value = value(res.z);

  const double h_norm = h.cwiseAbs().maxCoeff() * h.rows();
  double step = h_norm > 0 ? 1.0 / (2.0 * h_norm) : 1.0;
  if (cfg.step_rule == SolveConfig::StepRule::Fixed) step = cfg.fixed_step;

  for (res.iterations = 0; res.iterations < cfg.max_iters; ++res.iterations) {
    const Vector grad = 2.0 * (h * res.z) + g;
    const double residual = (res.z - project_box(res.z + grad, region)).norm();
    if (residual <= tol) {
      res.converged = true;
      break;
    }

    if (cfg.step_rule == SolveConfig::StepRule::Fixed) {
      Vector z_new = project_box(res.z + step * grad, region);
      const double f_new = value(z_new);
      if (f_new <= res.value) break;  // fixed step stalled
      res.z = std::move(z_new);
      res.value = f_new;
      continue;
    }

    double t = step;
    bool accepted = false;
    while (t > 1e-20 * step + 1e-300) {
      Vector z_new = project_box(res.z + t * grad, region);
      const double f_new = value(z_new);
      if (f_new >= res.value + kArmijo * grad.dot(z_new - res.z)) {
        res.z = std::move(z_new);
        res.value = f_new;
        step = 2.0 * t;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no improving step at working precision
  }
  return res;
}

// Stratified interior points from a Kronecker lattice with seeded offsets.
// The sequence is nested: a run with more starts extends a shorter run's
// start set, so best-of objectives are monotone in the start count.
std::vector<Vector> stratified_starts(const BoxRegion& region, int count,
                                      RandomStream& stream) {
  const int d = region.dim();
  Vector offset(d), alpha(d);
  int p = 1;
  auto next_prime = [&p]() {
    for (;;) {
      ++p;
      bool prime = p >= 2;
      for (int q = 2; q * q <= p; ++q)
        if (p % q == 0) {
          prime = false;
          break;
        }
      if (prime) return p;
    }
  };
  for (int i = 0; i < d; ++i) {
    offset(i) = stream.uniform01();
    const double root = std::sqrt(static_cast<double>(next_prime()));
    alpha(i) = root - std::floor(root);
  }
  std::vector<Vector> starts(count, Vector(d));
  for (int s = 0; s < count; ++s)
    for (int i = 0; i < d; ++i) {
      double u = offset(i) + (s + 1) * alpha(i);
      u -= std::floor(u);
      starts[s](i) = region.lower(i) + u * (region.upper(i) - region.lower(i));
    }
  return starts;
}

}  // namespace

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::ConcaveProjectedGradient: return "concave-pg";
    case SolveMethod::VertexEnumeration: return "vertex-enum";
    case SolveMethod::MultiStart: return "multi-start";
    case SolveMethod::SAA: return "saa";
    case SolveMethod::SGABasic: return "sga-basic";
    case SolveMethod::SGAAdaGrad: return "sga-adagrad";
    case SolveMethod::SGARMSProp: return "sga-rmsprop";
    default: return "sga-adam";
  }
}

Vector project_box(const Vector& z, const BoxRegion& region) {
  if (z.size() != region.lower.size())
    throw DimensionError("project_box: dimension mismatch");
  return z.cwiseMax(region.lower).cwiseMin(region.upper);
}

SolveReport maximize_concave(const Matrix& h, const Vector& g,
                             const BoxRegion& region, const SolveConfig& cfg,
                             std::optional<Vector> start) {
  const auto t0 = Clock::now();
  PgaResult res = pga(h, g, region, cfg,
                      start.has_value() ? *std::move(start) : region.center());
  SolveReport rep;
  rep.z_star = std::move(res.z);
  rep.objective = res.value;
  rep.method = SolveMethod::ConcaveProjectedGradient;
  rep.certified = res.converged;
  rep.iterations = res.iterations;
  rep.wall_time_seconds = seconds_since(t0);
  return rep;
}

SolveReport maximize_by_vertices(const Matrix& h, const Vector& g,
                                 const BoxRegion& region) {
  const auto t0 = Clock::now();
  const int d = region.dim();
  if (d > 62)
    throw DimensionError("maximize_by_vertices: dimension over limit");

  SolveReport rep;
  rep.method = SolveMethod::VertexEnumeration;
  rep.certified = true;

  Vector z(d);
  const std::uint64_t total = 1ULL << d;
  double best = -std::numeric_limits<double>::infinity();
  Vector best_z;
  for (std::uint64_t k = 0; k < total; ++k) {
    // Coordinate 0 is the most significant bit so ascending k enumerates
    // lower/upper patterns in lexicographic order; first strict max wins.
    for (int i = 0; i < d; ++i)
      z(i) = (k >> (d - 1 - i)) & 1ULL ? region.upper(i) : region.lower(i);
    const double f = z.dot(h * z) + g.dot(z);
    if (f > best) {
      best = f;
      best_z = z;
    }
  }
  rep.z_star = std::move(best_z);
  rep.objective = best;
  rep.iterations = static_cast<int>(std::min<std::uint64_t>(
      total, std::numeric_limits<int>::max()));
  rep.wall_time_seconds = seconds_since(t0);
  return rep;
}

SolveReport maximize_multi_start(const Matrix& h, const Vector& g,
                                 const BoxRegion& region,
                                 const SolveConfig& cfg,
                                 const std::vector<Vector>& extra_starts) {
  const auto t0 = Clock::now();
  RandomStream stream(cfg.seed, 0x5045u);

  std::vector<Vector> starts;
  starts.push_back(region.center());
  for (const Vector& s : extra_starts) starts.push_back(project_box(s, region));
  const int n_random = cfg.effective_starts(region.dim());
  for (Vector& s : stratified_starts(region, n_random, stream))
    starts.push_back(std::move(s));

  SolveReport rep;
  rep.method = SolveMethod::MultiStart;
  rep.certified = false;
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& s : starts) {
    PgaResult res = pga(h, g, region, cfg, s);
    rep.iterations += res.iterations;
    if (res.value > best) {
      best = res.value;
      rep.z_star = std::move(res.z);
    }
  }
  rep.objective = best;
  rep.wall_time_seconds = seconds_since(t0);
  return rep;
}

OptimumValue single_objective_optimum(SingleObjective which,
                                      const DisruptionCoefficients& dis,
                                      const DetectionCoefficients& det,
                                      const BoxRegion& region,
                                      const SolveConfig& cfg) {
  OptimumValue out;
  if (which == SingleObjective::Phi2) {
    // phi2 is strictly concave; its box maximum is exact.
    SolveReport rep = maximize_concave(-det.a, 2.0 * det.b, region, cfg);
    out.value = rep.objective;
    out.certified = rep.certified;
    out.arg = std::move(rep.z_star);
    return out;
  }
  if (region.dim() <= cfg.vertex_enum_limit) {
    SolveReport rep = maximize_by_vertices(dis.q, dis.v, region);
    out.value = rep.objective;
    out.certified = true;
    out.arg = std::move(rep.z_star);
  } else {
    SolveReport rep = maximize_multi_start(dis.q, dis.v, region, cfg);
    out.value = rep.objective;
    out.certified = false;
    out.arg = std::move(rep.z_star);
  }
  return out;
}

SolveReport solve_white_box(const AttackProblem& problem,
                            const SolveConfig& cfg) {
  const auto t0 = Clock::now();
  const Curvature curv = classify(problem);
  const bool truth_feasible = problem.region.contains(problem.truth_evidence);

  SolveReport rep;
  switch (curv) {
    case Curvature::Concave: {
      std::optional<Vector> start;
      if (truth_feasible) start = problem.truth_evidence;
      rep = maximize_concave(problem.h, problem.g, problem.region, cfg,
                             std::move(start));
      break;
    }
    case Curvature::Convex:
      if (problem.region.dim() <= cfg.vertex_enum_limit) {
        rep = maximize_by_vertices(problem.h, problem.g, problem.region);
        break;
      }
      [[fallthrough]];
    case Curvature::Indefinite:
      rep = maximize_multi_start(problem.h, problem.g, problem.region, cfg,
                                 {problem.truth_evidence});
      break;
  }

  rep.classification = curv;
  rep.kl_to_truth = problem.kl_at(rep.z_star);
  rep.log_ratio = problem.log_ratio_at(rep.z_star);
  rep.wall_time_seconds = seconds_since(t0);
  return rep;
}

}  // namespace mvgd
