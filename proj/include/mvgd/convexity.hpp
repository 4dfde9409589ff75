#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mvgd/objective.hpp"
#include "mvgd/random.hpp"

namespace mvgd {

enum class Curvature { Concave, Convex, Indefinite };

std::string to_string(Curvature c);

/// Eigenvalue classification tolerance, relative to the spectral radius.
inline constexpr double kSpecTol = 1e-10;

struct ConvexityReport {
  std::vector<double> rho;      // eigenvalues of Q, non-ascending
  std::vector<double> zeta;     // eigenvalues of Sigma_ZZ^-1, non-ascending
  std::vector<double> lambda_h; // eigenvalues of H at the problem weights
  Curvature classification = Curvature::Indefinite;
  double u1_minus = 0.0;
  double u1_plus = 1.0;
  std::optional<double> u1_tilde_minus;
  std::optional<double> u1_tilde_plus;
};

Curvature classify(const Matrix& h);
Curvature classify(const AttackProblem& problem);

/// Weyl-inequality sufficient bounds: the objective is certifiably concave
/// for u1 <= u1_minus and certifiably convex for u1 >= u1_plus, both
/// clamped to [0, 1].
std::pair<double, double> weyl_bounds(const DisruptionCoefficients& dis,
                                      const DetectionCoefficients& det,
                                      double phi1_star, double phi2_star);

/// Grid search for the concave->indefinite->convex transition points of
/// H(u1) = (u1/|phi1*|) Q - ((1-u1)/|phi2*|) A over u1 in [0, 1].
///
/// Grid semantics: the last grid point classified concave and the first
/// classified convex are shifted half a step toward the interior (the true
/// transition lies within step/2 of the estimate); shifts are suppressed at
/// the domain endpoints, and the pair is collapsed to its max if the two
/// nearly coincident transitions cross. The estimated indefinite width
/// therefore overshoots the true width by at most one step.
std::pair<double, double> brute_force_transition(
    const DisruptionCoefficients& dis, const DetectionCoefficients& det,
    double phi1_star, double phi2_star, double step = 0.005);

/// Full spectral report for an assembled problem; brute-force transition
/// estimates are filled in when requested.
ConvexityReport analyze_convexity(const AttackProblem& problem,
                                  bool brute_force = false,
                                  double step = 0.005);

enum class CovSampler { GGT, InverseWishart };

struct OvercoverageSummary {
  CovSampler sampler = CovSampler::GGT;
  int n = 0;
  int nz = 0;
  double phi1_star = 1.0;
  double phi2_star = 1.0;
  int trials = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double min = 0.0;
  std::vector<double> per_trial;
};

/// Replicates the bound-conservativeness study: per trial samples a
/// covariance (mu = 0, z' = 0), computes Weyl bounds and brute-force
/// transitions, and aggregates (u1+ - u1-) - (u1~+ - u1~-).
OvercoverageSummary overcoverage_study(CovSampler sampler, int n, int nz,
                                       double phi1_star, double phi2_star,
                                       int trials, RandomStream stream,
                                       double step = 0.005);

}  // namespace mvgd
