#include "mvgd/random.hpp"

#include <cmath>
#include <numbers>

namespace mvgd {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= stream_id * 0xda942042e4dd58b5ULL;
  std::uint64_t b = splitmix64(s);
  return a ^ (b + 0x9e3779b97f4a7c15ULL);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(mix_seed(seed, stream_id)) {}

RandomStream RandomStream::substream(std::uint64_t id) const {
  std::uint64_t s = stream_id_;
  // Derive a child id so nested substreams do not collide with siblings.
  std::uint64_t child = splitmix64(s) ^ (id + 0x632be59bd9b4e019ULL);
  return RandomStream(seed_, child);
}

std::uint64_t RandomStream::next_u64() { return engine_(); }

double RandomStream::uniform01() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double RandomStream::normal01() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

double RandomStream::gamma(double shape, double scale) {
  if (shape <= 0.0 || scale <= 0.0)
    throw std::invalid_argument("gamma: shape and scale must be positive");
  // Marsaglia-Tsang squeeze; the shape<1 case is boosted through shape+1.
  if (shape < 1.0) {
    const double u = uniform01();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal01();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return scale * d * v;
  }
}

double RandomStream::chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

double RandomStream::inverse_gamma(double shape, double scale) {
  // Shape-scale convention: mean = scale / (shape - 1) for shape > 1.
  return 1.0 / gamma(shape, 1.0 / scale);
}

Vector mvn_sample(const Vector& mean, const Matrix& cov, RandomStream& stream) {
  auto llt = cholesky_or_throw(cov, "mvn_sample");
  Vector z(mean.size());
  for (int i = 0; i < z.size(); ++i) z(i) = stream.normal01();
  return mean + Matrix(llt.matrixL()) * z;
}

Matrix wishart_sample(const Matrix& scale, double dof, RandomStream& stream) {
  const int n = static_cast<int>(scale.rows());
  if (dof <= n - 1)
    throw std::invalid_argument("wishart_sample: dof must exceed n-1");
  auto llt = cholesky_or_throw(scale, "wishart_sample");

  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = std::sqrt(stream.chi_squared(dof - i));
    for (int j = 0; j < i; ++j) a(i, j) = stream.normal01();
  }
  const Matrix la = Matrix(llt.matrixL()) * a;
  return symmetrized(la * la.transpose());
}

Matrix inv_wishart_sample(const Matrix& psi, double nu, RandomStream& stream) {
  const Matrix omega = spd_inverse(psi, "inv_wishart_sample");
  const Matrix w = wishart_sample(omega, nu, stream);
  return spd_inverse(w, "inv_wishart_sample");
}

MomentParams niw_sample(const NIWParams& p, RandomStream& stream) {
  if (p.kappa <= 0.0)
    throw std::invalid_argument("niw_sample: kappa must be positive");
  if (p.psi.rows() != p.mu0.size() || p.psi.cols() != p.mu0.size())
    throw DimensionError("niw_sample: psi shape does not match mu0");
  MomentParams out;
  out.cov = inv_wishart_sample(p.psi, p.nu, stream);
  out.mean = mvn_sample(p.mu0, out.cov / p.kappa, stream);
  return out;
}

Matrix ggt_covariance(int n, RandomStream& stream, int max_retries) {
  if (n < 1) throw std::invalid_argument("ggt_covariance: n must be >= 1");
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = stream.normal01();
    Matrix s = symmetrized(g * g.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    if (lo > kPdTol * hi) return s;
  }
  throw RetryLimitError("ggt_covariance: positive-definiteness retries exhausted");
}

}  // namespace mvgd
