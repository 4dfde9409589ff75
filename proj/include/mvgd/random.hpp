#pragma once

#include <cstdint>
#include <random>

#include "mvgd/gaussian.hpp"

namespace mvgd {

/// Deterministic random stream addressed by (seed, stream_id). Identical
/// addresses replay identical sequences regardless of thread schedule, so
/// parallel consumers pre-assign disjoint stream ids instead of sharing
/// generator state. Transforms (normal, gamma) are implemented here rather
/// than with std::*_distribution, whose sequences are unspecified.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// A stream addressed by the same seed and a different substream id.
  RandomStream substream(std::uint64_t id) const;

  std::uint64_t next_u64();
  double uniform01();                        // (0, 1]
  double uniform(double lo, double hi);
  double normal01();
  double gamma(double shape, double scale = 1.0);
  double chi_squared(double dof);
  double inverse_gamma(double shape, double scale);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

struct NIWParams {
  Vector mu0;
  double kappa = 1.0;
  Matrix psi;
  double nu = 0.0;

  int dim() const { return static_cast<int>(mu0.size()); }
};

Vector mvn_sample(const Vector& mean, const Matrix& cov, RandomStream& stream);

/// Bartlett-decomposition Wishart draw, W ~ W(scale, dof), dof > n-1.
Matrix wishart_sample(const Matrix& scale, double dof, RandomStream& stream);

/// Sigma ~ IW(psi, nu): the inverse of a W(psi^-1, nu) draw.
Matrix inv_wishart_sample(const Matrix& psi, double nu, RandomStream& stream);

/// (mu, Sigma) ~ NIW(mu0, kappa, psi, nu): Sigma ~ IW(psi, nu) then
/// mu ~ N(mu0, Sigma / kappa).
MomentParams niw_sample(const NIWParams& p, RandomStream& stream);

/// G G^T with G an n-by-n matrix of iid standard normals; redrawn on
/// positive-definiteness failure up to `max_retries` attempts.
Matrix ggt_covariance(int n, RandomStream& stream, int max_retries = 100);

}  // namespace mvgd
