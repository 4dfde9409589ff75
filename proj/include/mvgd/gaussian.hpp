#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mvgd/errors.hpp"

namespace mvgd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexSet = std::vector<int>;

// Relative tolerances used by the validators.
inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kPdTol = 1e-12;  // relative to the spectral radius

/// Index sets splitting a joint into latent (Y) and evidentiary (Z) blocks.
/// Sets may be non-contiguous and in any order; they must be disjoint,
/// non-empty, duplicate-free and cover {0..n-1} of the joint they refer to.
struct Partition {
  IndexSet y_idx;
  IndexSet z_idx;

  int ny() const { return static_cast<int>(y_idx.size()); }
  int nz() const { return static_cast<int>(z_idx.size()); }
  int dim() const { return ny() + nz(); }
};

struct ValidationReport {
  bool ok = false;
  double symmetry_defect = 0.0;      // max |S - S^T| relative to max |S|
  double min_eigenvalue = 0.0;       // of the symmetrized covariance
  double spectral_radius = 0.0;
  bool partition_ok = false;
  std::string reason;                // empty when ok
};

/// Moment-form joint Gaussian with a Y/Z partition; immutable after
/// construction. The constructor rejects anything validate_joint flags.
class GaussianJoint {
 public:
  GaussianJoint(Vector mean, Matrix cov, Partition partition);

  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }
  const Partition& partition() const { return partition_; }
  int dim() const { return static_cast<int>(mean_.size()); }

  // Canonical [Y then Z] ordering of the stored variables.
  const IndexSet& perm() const { return perm_; }
  Vector mean_yz() const;
  Matrix cov_yz() const;

 private:
  Vector mean_;
  Matrix cov_;
  Partition partition_;
  IndexSet perm_;  // perm_[k] = original index of canonical position k
};

/// Canonical (information-form) parameters: lambda = Sigma^-1,
/// eta = Sigma^-1 mu, xi the log-normalizer constant.
struct CanonicalForm {
  Matrix lambda;
  Vector eta;
  double xi = 0.0;
};

/// Conditional P(Y | Z = z). The covariance does not depend on z.
struct ConditionalGaussian {
  Vector mean;
  Matrix cov;
};

struct MomentParams {
  Vector mean;
  Matrix cov;
};

/// Report-only check of the GaussianJoint invariants on raw inputs.
ValidationReport validate_joint(const Vector& mean, const Matrix& cov,
                                const Partition& partition);
ValidationReport validate(const GaussianJoint& j);

CanonicalForm to_canonical(const GaussianJoint& j);
CanonicalForm to_canonical(const Vector& mean, const Matrix& cov);
MomentParams to_moment(const CanonicalForm& c);

ConditionalGaussian condition(const GaussianJoint& j, const Vector& z);
MomentParams marginal_z(const GaussianJoint& j);

/// KL(p || q) between two moment-form Gaussians of equal dimension.
double kl_gaussians(const Vector& mean_p, const Matrix& cov_p,
                    const Vector& mean_q, const Matrix& cov_q);
double kl_gaussians(const ConditionalGaussian& p, const ConditionalGaussian& q);

// Shared helpers (Cholesky-backed; never elementwise inverses).
Matrix symmetrized(const Matrix& m);
Eigen::LLT<Matrix> cholesky_or_throw(const Matrix& m, const char* what);
Matrix spd_inverse(const Matrix& m, const char* what);
double spd_log_det(const Matrix& m, const char* what);

}  // namespace mvgd
