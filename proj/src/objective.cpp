#include "mvgd/objective.hpp"

#include <cmath>

namespace mvgd {

Vector DetectionCoefficients::mode() const {
  return cholesky_or_throw(a, "DetectionCoefficients::mode").solve(b);
}

BoxRegion::BoxRegion(Vector lo, Vector hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size())
    throw DimensionError("BoxRegion: bound lengths differ");
  for (int i = 0; i < lower.size(); ++i) {
    if (!(lower(i) <= upper(i)))
      throw ValidationError("BoxRegion: lower must not exceed upper");
  }
}

bool BoxRegion::contains(const Vector& z, double tol) const {
  if (z.size() != lower.size()) return false;
  for (int i = 0; i < z.size(); ++i)
    if (z(i) < lower(i) - tol || z(i) > upper(i) + tol) return false;
  return true;
}

bool BoxRegion::has_interior() const {
  for (int i = 0; i < lower.size(); ++i)
    if (lower(i) < upper(i)) return true;
  return false;
}

BoxRegion BoxRegion::around(const Vector& center, double half_width) {
  return BoxRegion(center.array() - half_width, center.array() + half_width);
}

BoxRegion BoxRegion::fraction_of(const Vector& center, double fraction) {
  const Vector hw = fraction * center.cwiseAbs();
  return BoxRegion(center - hw, center + hw);
}

double AttackProblem::kl_at(const Vector& z) const {
  return 0.5 * (z.dot(dis.q * z) + dis.v.dot(z) + dis.c);
}

double AttackProblem::log_ratio_at(const Vector& z) const {
  const Vector d = z - det.mode();
  return -0.5 * d.dot(det.a * d);
}

DisruptionCoefficients build_disruption(const GaussianJoint& j,
                                        const Vector& z_true) {
  const int ny = j.partition().ny();
  const int nz = j.partition().nz();
  if (static_cast<int>(z_true.size()) != nz)
    throw DimensionError("build_disruption: z_true length does not match |Z|");

  const Vector mu = j.mean_yz();
  const Matrix sigma = j.cov_yz();
  const Matrix lambda = spd_inverse(sigma, "build_disruption");
  const Matrix lam_yy = lambda.topLeftCorner(ny, ny);
  const Matrix lam_yz = lambda.topRightCorner(ny, nz);
  const Vector eta_y = (lambda * mu).head(ny);

  auto llt_yy = cholesky_or_throw(lam_yy, "build_disruption");
  const Matrix lam_yy_inv_lam_yz = llt_yy.solve(lam_yz);
  const Vector lam_yy_inv_eta = llt_yy.solve(eta_y);
  const Vector mu_cond = condition(j, z_true).mean;

  DisruptionCoefficients d;
  d.q = symmetrized(lam_yz.transpose() * lam_yy_inv_lam_yz);
  d.v = 2.0 * (lam_yz.transpose() * mu_cond -
               lam_yz.transpose() * lam_yy_inv_eta);
  d.c = mu_cond.dot(lam_yy * mu_cond) - 2.0 * eta_y.dot(mu_cond) +
        eta_y.dot(lam_yy_inv_eta);
  return d;
}

DetectionCoefficients build_detection(const GaussianJoint& j) {
  const MomentParams mz = marginal_z(j);
  DetectionCoefficients d;
  d.a = spd_inverse(mz.cov, "build_detection");
  d.b = d.a * mz.mean;
  return d;
}

double phi1(const DisruptionCoefficients& d, const Vector& z) {
  if (z.size() != d.v.size()) throw DimensionError("phi1: dimension mismatch");
  return z.dot(d.q * z) + d.v.dot(z);
}

double phi2(const DetectionCoefficients& d, const Vector& z) {
  if (z.size() != d.b.size()) throw DimensionError("phi2: dimension mismatch");
  return -z.dot(d.a * z) + 2.0 * z.dot(d.b);
}

ObjectiveWeights normalize_weights(double u1, double phi1_star,
                                   double phi2_star, bool phi1_certified,
                                   bool phi2_certified) {
  if (!(u1 >= 0.0 && u1 <= 1.0))
    throw ValidationError("normalize_weights: u1 must lie in [0, 1]");
  if (std::abs(phi1_star) <= kWeightEps)
    throw DegenerateNormalization(
        "normalize_weights: |phi1*| below weight_eps");
  if (std::abs(phi2_star) <= kWeightEps)
    throw DegenerateNormalization(
        "normalize_weights: |phi2*| below weight_eps");

  ObjectiveWeights w;
  w.u1 = u1;
  w.u2 = 1.0 - u1;
  w.phi1_star = phi1_star;
  w.phi2_star = phi2_star;
  w.w1 = w.u1 / std::abs(phi1_star);
  w.w2 = w.u2 / std::abs(phi2_star);
  w.phi1_certified = phi1_certified;
  w.phi2_certified = phi2_certified;
  return w;
}

AttackProblem assemble_wb(const DisruptionCoefficients& dis,
                          const DetectionCoefficients& det,
                          const ObjectiveWeights& weights,
                          const BoxRegion& region, const Vector& z_true) {
  const int nz = static_cast<int>(z_true.size());
  if (dis.v.size() != nz || det.b.size() != nz || region.dim() != nz)
    throw DimensionError("assemble_wb: dimension mismatch");

  AttackProblem p{Matrix(), Vector(), dis, det, region, z_true, weights};
  p.h = symmetrized(weights.w1 * dis.q - weights.w2 * det.a);
  p.g = weights.w1 * dis.v + 2.0 * weights.w2 * det.b;
  return p;
}

double eval_kl_to_truth(const GaussianJoint& j_true, const Vector& z_true,
                        const Vector& z) {
  return kl_gaussians(condition(j_true, z_true), condition(j_true, z));
}

}  // namespace mvgd
