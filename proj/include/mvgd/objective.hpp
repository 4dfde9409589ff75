#pragma once

#include "mvgd/gaussian.hpp"

namespace mvgd {

inline constexpr double kWeightEps = 1e-9;

/// Quadratic coefficients of the disruption surrogate: the KL divergence
/// between the true and corrupted conditionals is (z'Qz + v'z + c) / 2.
struct DisruptionCoefficients {
  Matrix q;   // |Z| x |Z|, PSD
  Vector v;
  double c = 0.0;
};

/// phi2 coefficients: A = Sigma_ZZ^-1 (PD), b = A mu_Z.
struct DetectionCoefficients {
  Matrix a;
  Vector b;

  Vector mode() const;  // mu_Z = A^-1 b
};

/// Axis-aligned feasible attack region. lower <= upper componentwise;
/// degenerate (zero-width) coordinates are allowed so that an attack can be
/// pinned to the truth, and interior emptiness is left to has_interior().
struct BoxRegion {
  Vector lower;
  Vector upper;

  BoxRegion(Vector lo, Vector hi);
  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vector& z, double tol = 1e-12) const;
  bool has_interior() const;
  Vector center() const { return 0.5 * (lower + upper); }

  static BoxRegion around(const Vector& center, double half_width);
  static BoxRegion fraction_of(const Vector& center, double fraction);
};

struct ObjectiveWeights {
  double u1 = 0.5;
  double u2 = 0.5;
  double phi1_star = 0.0;
  double phi2_star = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  bool phi1_certified = true;  // false when phi* came from a heuristic solve
  bool phi2_certified = true;
};

/// Problem WB assembled as max_z z'Hz + g'z over the box. Component
/// coefficients are kept alongside H and g so that reports can quote the
/// KL divergence (which needs c) and the log-ratio, and so that sweeps can
/// re-normalize without rebuilding from the joint.
struct AttackProblem {
  Matrix h;
  Vector g;
  DisruptionCoefficients dis;
  DetectionCoefficients det;
  BoxRegion region;
  Vector truth_evidence;
  ObjectiveWeights weights;

  double objective(const Vector& z) const { return z.dot(h * z) + g.dot(z); }
  Vector gradient(const Vector& z) const { return 2.0 * (h * z) + g; }
  double kl_at(const Vector& z) const;         // via Property-1 coefficients
  double log_ratio_at(const Vector& z) const;  // <= 0, 0 at the marginal mode
};

DisruptionCoefficients build_disruption(const GaussianJoint& j,
                                        const Vector& z_true);
DetectionCoefficients build_detection(const GaussianJoint& j);

double phi1(const DisruptionCoefficients& d, const Vector& z);
double phi2(const DetectionCoefficients& d, const Vector& z);

ObjectiveWeights normalize_weights(double u1, double phi1_star,
                                   double phi2_star,
                                   bool phi1_certified = true,
                                   bool phi2_certified = true);

AttackProblem assemble_wb(const DisruptionCoefficients& dis,
                          const DetectionCoefficients& det,
                          const ObjectiveWeights& weights,
                          const BoxRegion& region, const Vector& z_true);

/// KL divergence of the conditional induced by z from the true conditional,
/// both under the (true) joint.
double eval_kl_to_truth(const GaussianJoint& j_true, const Vector& z_true,
                        const Vector& z);

}  // namespace mvgd
