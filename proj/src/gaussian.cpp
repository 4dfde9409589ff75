#include "mvgd/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace mvgd {

namespace {

bool partition_consistent(const Partition& p, int n, std::string* why) {
  if (p.y_idx.empty() || p.z_idx.empty()) {
    *why = "partition block empty";
    return false;
  }
  std::set<int> seen;
  for (int i : p.y_idx) seen.insert(i);
  for (int i : p.z_idx) seen.insert(i);
  if (static_cast<int>(seen.size()) != p.dim() || p.dim() != n) {
    *why = "partition indices must be disjoint and cover 0..n-1";
    return false;
  }
  if (*seen.begin() != 0 || *seen.rbegin() != n - 1) {
    *why = "partition indices out of range";
    return false;
  }
  return true;
}

Matrix permute_cov(const Matrix& cov, const IndexSet& perm) {
  const int n = static_cast<int>(perm.size());
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = cov(perm[i], perm[j]);
  return out;
}

Vector permute_vec(const Vector& v, const IndexSet& perm) {
  const int n = static_cast<int>(perm.size());
  Vector out(n);
  for (int i = 0; i < n; ++i) out(i) = v(perm[i]);
  return out;
}

}  // namespace

ValidationReport validate_joint(const Vector& mean, const Matrix& cov,
                                const Partition& partition) {
  ValidationReport rep;
  const int n = static_cast<int>(mean.size());
  if (cov.rows() != n || cov.cols() != n) {
    rep.reason = "covariance shape does not match mean length";
    return rep;
  }

  const double scale = cov.cwiseAbs().maxCoeff();
  rep.symmetry_defect =
      scale > 0 ? (cov - cov.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
  const bool symmetric = rep.symmetry_defect <= kSymmetryTol;

  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(cov),
                                           Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  rep.spectral_radius = es.eigenvalues().cwiseAbs().maxCoeff();
  const bool pd = rep.min_eigenvalue > kPdTol * rep.spectral_radius;

  std::string why;
  rep.partition_ok = partition_consistent(partition, n, &why);

  if (!symmetric) rep.reason = "asymmetric";
  else if (!pd) rep.reason = "not PD";
  else if (!rep.partition_ok) rep.reason = why;
  rep.ok = symmetric && pd && rep.partition_ok;
  return rep;
}

ValidationReport validate(const GaussianJoint& j) {
  return validate_joint(j.mean(), j.cov(), j.partition());
}

GaussianJoint::GaussianJoint(Vector mean, Matrix cov, Partition partition)
    : mean_(std::move(mean)), cov_(std::move(cov)),
      partition_(std::move(partition)) {
  ValidationReport rep = validate_joint(mean_, cov_, partition_);
  if (!rep.ok) throw ValidationError("invalid GaussianJoint: " + rep.reason);
  perm_.reserve(partition_.dim());
  perm_.insert(perm_.end(), partition_.y_idx.begin(), partition_.y_idx.end());
  perm_.insert(perm_.end(), partition_.z_idx.begin(), partition_.z_idx.end());
}

Vector GaussianJoint::mean_yz() const { return permute_vec(mean_, perm_); }
Matrix GaussianJoint::cov_yz() const { return permute_cov(cov_, perm_); }

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Eigen::LLT<Matrix> cholesky_or_throw(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(symmetrized(m));
  if (llt.info() != Eigen::Success)
    throw SingularMatrixError(std::string(what) +
                              ": matrix not positive definite at working precision");
  return llt;
}

Matrix spd_inverse(const Matrix& m, const char* what) {
  auto llt = cholesky_or_throw(m, what);
  Matrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  return symmetrized(inv);
}

double spd_log_det(const Matrix& m, const char* what) {
  auto llt = cholesky_or_throw(m, what);
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

CanonicalForm to_canonical(const Vector& mean, const Matrix& cov) {
  const int n = static_cast<int>(mean.size());
  CanonicalForm c;
  c.lambda = spd_inverse(cov, "to_canonical");
  c.eta = c.lambda * mean;
  const double log_det = spd_log_det(cov, "to_canonical");
  c.xi = -0.5 * mean.dot(c.eta) -
         0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det);
  return c;
}

CanonicalForm to_canonical(const GaussianJoint& j) {
  return to_canonical(j.mean(), j.cov());
}

MomentParams to_moment(const CanonicalForm& c) {
  MomentParams m;
  m.cov = spd_inverse(c.lambda, "to_moment");
  m.mean = m.cov * c.eta;
  return m;
}

ConditionalGaussian condition(const GaussianJoint& j, const Vector& z) {
  const int ny = j.partition().ny();
  const int nz = j.partition().nz();
  if (static_cast<int>(z.size()) != nz)
    throw DimensionError("condition: evidence length does not match |Z|");

  const Vector mu = j.mean_yz();
  const Matrix sigma = j.cov_yz();
  const auto mu_y = mu.head(ny);
  const auto mu_z = mu.tail(nz);
  const Matrix syy = sigma.topLeftCorner(ny, ny);
  const Matrix syz = sigma.topRightCorner(ny, nz);
  const Matrix szz = sigma.bottomRightCorner(nz, nz);

  auto llt = cholesky_or_throw(szz, "condition");
  // gain = Sigma_YZ Sigma_ZZ^-1, computed as a solve against Sigma_ZZ.
  const Matrix gain = llt.solve(syz.transpose()).transpose();

  ConditionalGaussian out;
  out.mean = mu_y + gain * (z - mu_z);
  out.cov = symmetrized(syy - gain * syz.transpose());
  return out;
}

MomentParams marginal_z(const GaussianJoint& j) {
  const int nz = j.partition().nz();
  const Vector mu = j.mean_yz();
  const Matrix sigma = j.cov_yz();
  return {mu.tail(nz), sigma.bottomRightCorner(nz, nz)};
}

double kl_gaussians(const Vector& mean_p, const Matrix& cov_p,
                    const Vector& mean_q, const Matrix& cov_q) {
  const int k = static_cast<int>(mean_p.size());
  if (mean_q.size() != k || cov_p.rows() != k || cov_q.rows() != k)
    throw DimensionError("kl_gaussians: dimension mismatch");

  auto llt_q = cholesky_or_throw(cov_q, "kl_gaussians");
  const double log_det_q = 2.0 * llt_q.matrixLLT().diagonal().array().log().sum();
  const double log_det_p = spd_log_det(cov_p, "kl_gaussians");
  const Vector d = mean_q - mean_p;
  const double maha = d.dot(llt_q.solve(d));
  const double trace = llt_q.solve(cov_p).trace();
  return 0.5 * (trace + maha - k + log_det_q - log_det_p);
}

double kl_gaussians(const ConditionalGaussian& p, const ConditionalGaussian& q) {
  return kl_gaussians(p.mean, p.cov, q.mean, q.cov);
}

}  // namespace mvgd
