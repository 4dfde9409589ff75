#pragma once

#include <memory>

#include "mvgd/solvers.hpp"

namespace mvgd {

/// Attacker belief over the decisionmaker's joint; concrete priors emit
/// validated GaussianJoint samples from a caller-owned stream.
class Prior {
 public:
  virtual ~Prior() = default;
  virtual GaussianJoint sample(RandomStream& stream) const = 0;
  virtual std::string name() const = 0;
};

GaussianJoint sample_valid(const Prior& prior, RandomStream& stream,
                           int max_retries = 100);

class PointMassPrior final : public Prior {
 public:
  explicit PointMassPrior(GaussianJoint joint) : joint_(std::move(joint)) {}
  GaussianJoint sample(RandomStream&) const override { return joint_; }
  std::string name() const override { return "point-mass"; }
  const GaussianJoint& joint() const { return joint_; }

 private:
  GaussianJoint joint_;
};

class NIWPrior final : public Prior {
 public:
  NIWPrior(NIWParams params, Partition partition);
  GaussianJoint sample(RandomStream& stream) const override;
  std::string name() const override { return "niw"; }
  const NIWParams& params() const { return params_; }
  const Partition& partition() const { return partition_; }

 private:
  NIWParams params_;
  Partition partition_;
};

/// Per-sample Problem GB2 ingredients, all under one sampled joint.
struct SampledCoefficients {
  DisruptionCoefficients dis;  // Q_j, v_j, c_j with mu_{Y|z'} of the sample
  DetectionCoefficients det;   // A_j = Sigma_ZZ,j^-1, b_j = A_j mu_Z,j
};

SampledCoefficients sampled_coefficients(const GaussianJoint& joint,
                                         const Vector& z_true);

struct SGAConfig {
  enum class Variant { Basic, AdaGrad, RMSProp, Adam };
  Variant variant = Variant::Adam;
  double alpha = 0.001;
  double eps = 1e-8;
  double tau1 = 0.9;  // decay of the squared-gradient average
  double tau2 = 0.9;  // momentum decay (Adam)
  double stop_delta = 1e-4;
  int max_iters = 5000;
  std::uint64_t seed = 0;
  // Sample count used to normalize weights and report objective estimates;
  // plays the role SAA's J plays for Problem GB2.
  int normalization_samples = 1000;
};

std::string to_string(SGAConfig::Variant v);

/// Property-5 closed forms under an NIW prior (omega = psi^-1, both in the
/// partition's [Y then Z] ordering): E[Q] and E[Sigma_ZZ^-1].
std::pair<Matrix, Matrix> expected_niw_coefficients(const NIWParams& p,
                                                    const Partition& partition);

/// Draws J joints and collapses Problem GB2 to one quadratic: averaged
/// Q, v, c, A, b with weights normalized against the sample-average
/// component objectives. Substream j is pre-assigned to sample j, so the
/// result does not depend on evaluation order.
AttackProblem saa_assemble(const Prior& prior, const Vector& z_true, double u1,
                           const BoxRegion& region, int j_samples,
                           RandomStream stream, const SolveConfig& cfg = {},
                           double* sampling_seconds = nullptr);

SolveReport solve_saa(const Prior& prior, const Vector& z_true, double u1,
                      const BoxRegion& region, int j_samples,
                      const SolveConfig& cfg, RandomStream stream,
                      std::optional<AttackProblem>* problem_out = nullptr);

/// Gradient of the sampled objective w1 phi1_j + w2 phi2_j at z.
Vector sga_gradient_sample(const GaussianJoint& joint, const Vector& z_true,
                           const Vector& z, const ObjectiveWeights& weights);

/// `trace`, when given, receives every post-projection iterate in order;
/// `problem_out` the averaged problem used for weights and reporting.
SolveReport solve_sga(const Prior& prior, const Vector& z_true, double u1,
                      const BoxRegion& region, const SGAConfig& cfg,
                      RandomStream stream,
                      std::vector<Vector>* trace = nullptr,
                      std::optional<AttackProblem>* problem_out = nullptr);

}  // namespace mvgd
