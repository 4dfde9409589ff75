#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_helpers.hpp"

using namespace mvgd;
using mvgd::testing::leading_partition;
using mvgd::testing::random_joint;
using mvgd::testing::random_vector;

namespace {

GaussianJoint bivariate_rho_half() {
  Matrix cov(2, 2);
  cov << 1.0, 0.5, 0.5, 1.0;
  return GaussianJoint(Vector::Zero(2), cov, leading_partition(1, 2));
}

}  // namespace

TEST_CASE("independent blocks produce a null disruption objective") {
  Matrix cov = Matrix::Identity(4, 4);
  cov(0, 1) = cov(1, 0) = 0.3;  // association within Y only
  const GaussianJoint j(Vector::Ones(4), cov, leading_partition(2, 4));
  const auto d = build_disruption(j, Vector::Ones(2));
  CHECK(d.q.norm() <= 1e-12);
  CHECK(d.v.norm() <= 1e-12);
  CHECK(std::abs(d.c) <= 1e-12);
}

TEST_CASE("scalar Q equals rho^2/(1-rho^2)") {
  const auto d = build_disruption(bivariate_rho_half(), Vector::Ones(1));
  CHECK(d.q(0, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("quadratic form reproduces the conditional KL everywhere") {
  RandomStream stream(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(stream.next_u64() % 8);
    const int ny = 1 + static_cast<int>(stream.next_u64() % (n - 1));
    const GaussianJoint j = random_joint(n, ny, stream);
    const Vector z_true = random_vector(n - ny, stream);
    const Vector z = random_vector(n - ny, stream);
    const auto d = build_disruption(j, z_true);
    const double quad = 0.5 * (z.dot(d.q * z) + d.v.dot(z) + d.c);
    const double kl = kl_gaussians(condition(j, z_true), condition(j, z));
    CHECK(std::abs(quad - kl) <= 1e-8 * (1.0 + kl));
    // Property 1 vanishes at the true evidence.
    const double at_truth =
        0.5 * (z_true.dot(d.q * z_true) + d.v.dot(z_true) + d.c);
    CHECK(std::abs(at_truth) <= 1e-8);
  }
}

TEST_CASE("disruption Q is positive semi-definite") {
  RandomStream stream(37);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(stream.next_u64() % 8);
    const int ny = 1 + static_cast<int>(stream.next_u64() % (n - 1));
    const auto d = build_disruption(random_joint(n, ny, stream),
                                    Vector::Zero(n - ny));
    Eigen::SelfAdjointEigenSolver<Matrix> es(d.q, Eigen::EigenvaluesOnly);
    const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * std::max(radius, 1.0));
  }
}

TEST_CASE("oracle KL is symmetric in its arguments") {
  RandomStream stream(41);
  const GaussianJoint j = random_joint(5, 2, stream);
  const Vector za = random_vector(3, stream);
  const Vector zb = random_vector(3, stream);
  const double ab = kl_gaussians(condition(j, za), condition(j, zb));
  const double ba = kl_gaussians(condition(j, zb), condition(j, za));
  CHECK(std::abs(ab - ba) <= 1e-8 * (1.0 + ab));
}

TEST_CASE("detection coefficients for the identity marginal") {
  const GaussianJoint j(Vector::Zero(3), Matrix::Identity(3, 3),
                        leading_partition(1, 3));
  const auto d = build_detection(j);
  CHECK((d.a - Matrix::Identity(2, 2)).norm() <= 1e-12);
  CHECK(d.b.norm() <= 1e-12);
  Vector z(2);
  z << 1.0, -2.0;
  CHECK(phi2(d, z) == doctest::Approx(-z.squaredNorm()));
}

TEST_CASE("phi2 peaks at the marginal mode") {
  RandomStream stream(43);
  const GaussianJoint j = random_joint(5, 2, stream);
  const auto d = build_detection(j);
  const Vector mu_z = marginal_z(j).mean;
  const double at_mode = phi2(d, mu_z);
  CHECK(at_mode == doctest::Approx(mu_z.dot(d.a * mu_z)));
  for (int k = 0; k < 20; ++k)
    CHECK(phi2(d, mu_z + random_vector(3, stream)) <= at_mode + 1e-10);
}

TEST_CASE("phi2 differences equal the marginal log-density ratio") {
  RandomStream stream(47);
  const GaussianJoint j = random_joint(6, 3, stream);
  const auto d = build_detection(j);
  const MomentParams mz = marginal_z(j);
  const Vector z = random_vector(3, stream);
  // log f(z) - log f(mu_Z) = -(z-mu)' A (z-mu) / 2.
  const Vector diff = z - mz.mean;
  const double log_ratio = -0.5 * diff.dot(d.a * diff);
  CHECK(0.5 * (phi2(d, z) - phi2(d, mz.mean)) ==
        doctest::Approx(log_ratio).epsilon(1e-10));
}

TEST_CASE("phi evaluations match direct polynomial expansion") {
  RandomStream stream(53);
  const GaussianJoint j = random_joint(4, 2, stream);
  const Vector z_true = random_vector(2, stream);
  const auto dis = build_disruption(j, z_true);
  const auto det = build_detection(j);
  const Vector z = random_vector(2, stream);

  double p1 = 0.0, p2 = 0.0;
  for (int a = 0; a < 2; ++a) {
    p1 += dis.v(a) * z(a);
    p2 += 2.0 * det.b(a) * z(a);
    for (int b = 0; b < 2; ++b) {
      p1 += z(a) * dis.q(a, b) * z(b);
      p2 -= z(a) * det.a(a, b) * z(b);
    }
  }
  CHECK(phi1(dis, z) == doctest::Approx(p1).epsilon(1e-12));
  CHECK(phi2(det, z) == doctest::Approx(p2).epsilon(1e-12));
  // phi1 at the truth equals -c since the KL vanishes there.
  CHECK(phi1(dis, z_true) == doctest::Approx(-dis.c).epsilon(1e-9));
}

TEST_CASE("weight normalization arithmetic and guards") {
  const ObjectiveWeights w = normalize_weights(0.5, 2.0, -4.0);
  CHECK(w.w1 == doctest::Approx(0.25));
  CHECK(w.w2 == doctest::Approx(0.125));
  CHECK(w.u1 + w.u2 == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(normalize_weights(0.5, 2.0, 0.0), DegenerateNormalization);
  CHECK_THROWS_AS(normalize_weights(0.5, 1e-12, 1.0),
                  DegenerateNormalization);
  CHECK_THROWS_AS(normalize_weights(1.5, 1.0, 1.0), ValidationError);
}

TEST_CASE("assembled problem reproduces the weighted objective pointwise") {
  RandomStream stream(59);
  const GaussianJoint j = random_joint(5, 2, stream);
  const Vector z_true = random_vector(3, stream);
  const auto dis = build_disruption(j, z_true);
  const auto det = build_detection(j);
  const auto w = normalize_weights(0.3, 1.7, 2.9);
  const BoxRegion region = BoxRegion::around(z_true, 0.5);
  const AttackProblem p = assemble_wb(dis, det, w, region, z_true);

  for (int k = 0; k < 25; ++k) {
    const Vector z = random_vector(3, stream);
    const double direct = w.w1 * phi1(dis, z) + w.w2 * phi2(det, z);
    CHECK(p.objective(z) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("block-diagonal joints assemble to a negative-definite H") {
  const GaussianJoint j(Vector::Zero(4), Matrix::Identity(4, 4),
                        leading_partition(2, 4));
  const auto dis = build_disruption(j, Vector::Zero(2));
  const auto det = build_detection(j);
  // Q = 0, so H = -w2 A regardless of u1.
  const auto w = normalize_weights(0.9, 1.0, 1.0);
  const AttackProblem p =
      assemble_wb(dis, det, w, BoxRegion::around(Vector::Zero(2), 1.0),
                  Vector::Zero(2));
  Eigen::SelfAdjointEigenSolver<Matrix> es(p.h, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().maxCoeff() < 0.0);
  CHECK((p.h + w.w2 * det.a).norm() <= 1e-14);
}

TEST_CASE("kl to truth: closed form for the bivariate case") {
  const GaussianJoint j = bivariate_rho_half();
  const Vector z_true = Vector::Ones(1);
  const Vector z = Vector::Zero(1);
  // rho^2 (z-z')^2 / (2 (1-rho^2)) with rho = 0.5.
  CHECK(eval_kl_to_truth(j, z_true, z) == doctest::Approx(1.0 / 6.0));
  CHECK(eval_kl_to_truth(j, z_true, z_true) == doctest::Approx(0.0));
}

TEST_CASE("kl to truth agrees with the Property-1 quadratic") {
  RandomStream stream(61);
  for (int trial = 0; trial < 50; ++trial) {
    const GaussianJoint j = random_joint(6, 3, stream);
    const Vector z_true = random_vector(3, stream);
    const Vector z = random_vector(3, stream);
    const auto d = build_disruption(j, z_true);
    const double quad = 0.5 * (z.dot(d.q * z) + d.v.dot(z) + d.c);
    CHECK(eval_kl_to_truth(j, z_true, z) ==
          doctest::Approx(quad).epsilon(1e-8));
  }
}

TEST_CASE("box region construction and guards") {
  Vector lo(2), hi(2);
  lo << 0.0, 1.0;
  hi << 1.0, 1.0;  // one degenerate coordinate is fine
  const BoxRegion box(lo, hi);
  CHECK(box.has_interior());
  CHECK(box.contains(box.center()));
  CHECK_FALSE(BoxRegion(lo, lo).has_interior());
  CHECK_THROWS_AS(BoxRegion(hi, lo), ValidationError);

  const BoxRegion frac = BoxRegion::fraction_of(hi, 0.1);
  CHECK(frac.lower(0) == doctest::Approx(0.9));
  CHECK(frac.upper(0) == doctest::Approx(1.1));
}
