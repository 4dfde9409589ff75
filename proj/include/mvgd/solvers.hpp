#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvgd/convexity.hpp"
#include "mvgd/objective.hpp"

namespace mvgd {

enum class SolveMethod {
  ConcaveProjectedGradient,
  VertexEnumeration,
  MultiStart,
  SAA,
  SGABasic,
  SGAAdaGrad,
  SGARMSProp,
  SGAAdam,
};

std::string to_string(SolveMethod m);

struct SolveConfig {
  int max_iters = 10000;
  double grad_tol = 1e-8;   // scaled internally by the box extent
  enum class StepRule { Fixed, Backtracking } step_rule = StepRule::Backtracking;
  double fixed_step = 1e-2; // used only under StepRule::Fixed
  int starts = 0;           // 0 = max(20, 4|Z|)
  int vertex_enum_limit = 16;
  std::uint64_t seed = 0;

  int effective_starts(int nz) const {
    return starts > 0 ? starts : std::max(20, 4 * nz);
  }
};

struct SolveReport {
  Vector z_star;
  double objective = 0.0;
  SolveMethod method = SolveMethod::MultiStart;
  bool certified = false;
  int iterations = 0;
  double wall_time_seconds = 0.0;

  // Filled by the dispatching solvers.
  std::optional<Curvature> classification;
  std::optional<double> kl_to_truth;   // via Property-1 coefficients
  std::optional<double> log_ratio;     // plausibility of z_star
  std::optional<int> j_samples;        // SAA sample count
  double sampling_seconds = 0.0;       // grey-box parameter sampling time
};

Vector project_box(const Vector& z, const BoxRegion& region);

/// Global maximizer of a concave quadratic z'Hz + g'z over the box via
/// projected gradient ascent with Armijo backtracking. Reports
/// certified=false only if the iteration cap is hit first.
SolveReport maximize_concave(const Matrix& h, const Vector& g,
                             const BoxRegion& region, const SolveConfig& cfg,
                             std::optional<Vector> start = std::nullopt);

/// Exhaustive vertex search; exact for convex objectives. Ties are broken
/// toward the lexicographically smallest lower/upper pattern.
SolveReport maximize_by_vertices(const Matrix& h, const Vector& g,
                                 const BoxRegion& region);

/// Best of several projected-gradient ascents started from stratified
/// interior points, the box center, and any caller-supplied points.
SolveReport maximize_multi_start(const Matrix& h, const Vector& g,
                                 const BoxRegion& region,
                                 const SolveConfig& cfg,
                                 const std::vector<Vector>& extra_starts = {});

enum class SingleObjective { Phi1, Phi2 };

struct OptimumValue {
  double value = 0.0;
  bool certified = false;
  Vector arg;
};

/// phi2* via the concave path; phi1* via vertex enumeration when |Z| is
/// within the limit (convex maximum sits on a vertex), multi-start above it.
OptimumValue single_objective_optimum(SingleObjective which,
                                      const DisruptionCoefficients& dis,
                                      const DetectionCoefficients& det,
                                      const BoxRegion& region,
                                      const SolveConfig& cfg);

/// Classifies H and dispatches: concave -> projected gradient, convex ->
/// vertex enumeration (multi-start above the enumeration limit), indefinite
/// -> multi-start seeded with the truth and the box center.
SolveReport solve_white_box(const AttackProblem& problem,
                            const SolveConfig& cfg);

}  // namespace mvgd
