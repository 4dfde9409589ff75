#include "mvgd/greybox.hpp"

#include <chrono>
#include <cmath>

namespace mvgd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Matrix permute_to_yz(const Matrix& m, const Partition& p) {
  IndexSet perm;
  perm.reserve(p.dim());
  perm.insert(perm.end(), p.y_idx.begin(), p.y_idx.end());
  perm.insert(perm.end(), p.z_idx.begin(), p.z_idx.end());
  const int n = p.dim();
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = m(perm[i], perm[j]);
  return out;
}

}  // namespace

GaussianJoint sample_valid(const Prior& prior, RandomStream& stream,
                           int max_retries) {
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    try {
      return prior.sample(stream);
    } catch (const ValidationError&) {
      // numerically degenerate draw; the stream has advanced, try again
    } catch (const SingularMatrixError&) {
    }
  }
  throw RetryLimitError("sample_valid: prior retries exhausted");
}

NIWPrior::NIWPrior(NIWParams params, Partition partition)
    : params_(std::move(params)), partition_(std::move(partition)) {
  const int n = params_.dim();
  if (partition_.dim() != n)
    throw DimensionError("NIWPrior: partition does not match mu0 length");
  if (params_.nu <= n - 1)
    throw ValidationError("NIWPrior: nu must exceed n-1");
}

GaussianJoint NIWPrior::sample(RandomStream& stream) const {
  MomentParams draw = niw_sample(params_, stream);
  return GaussianJoint(std::move(draw.mean), std::move(draw.cov), partition_);
}

SampledCoefficients sampled_coefficients(const GaussianJoint& joint,
                                         const Vector& z_true) {
  return {build_disruption(joint, z_true), build_detection(joint)};
}

std::string to_string(SGAConfig::Variant v) {
  switch (v) {
    case SGAConfig::Variant::Basic: return "basic";
    case SGAConfig::Variant::AdaGrad: return "adagrad";
    case SGAConfig::Variant::RMSProp: return "rmsprop";
    default: return "adam";
  }
}

std::pair<Matrix, Matrix> expected_niw_coefficients(const NIWParams& p,
                                                    const Partition& partition) {
  const int ny = partition.ny();
  const int nz = partition.nz();
  if (p.dim() != partition.dim())
    throw DimensionError("expected_niw_coefficients: dimension mismatch");
  if (p.nu <= ny + nz - 1)
    throw ValidationError("expected_niw_coefficients: nu must exceed n-1");

  const Matrix psi = permute_to_yz(p.psi, partition);
  const Matrix omega = spd_inverse(psi, "expected_niw_coefficients");
  const Matrix omega_yy = omega.topLeftCorner(ny, ny);
  const Matrix omega_yz = omega.topRightCorner(ny, nz);
  const Matrix omega_zz = omega.bottomRightCorner(nz, nz);

  auto llt = cholesky_or_throw(omega_yy, "expected_niw_coefficients");
  const Matrix eq = symmetrized(
      (p.nu - ny) * (omega_yz.transpose() * llt.solve(omega_yz)) +
      ny * omega_zz);
  const Matrix eprec =
      (p.nu - ny) *
      spd_inverse(psi.bottomRightCorner(nz, nz), "expected_niw_coefficients");
  return {eq, eprec};
}

AttackProblem saa_assemble(const Prior& prior, const Vector& z_true, double u1,
                           const BoxRegion& region, int j_samples,
                           RandomStream stream, const SolveConfig& cfg,
                           double* sampling_seconds) {
  if (j_samples < 1)
    throw std::invalid_argument("saa_assemble: need at least one sample");
  const int nz = static_cast<int>(z_true.size());

  const auto t0 = Clock::now();
  DisruptionCoefficients dis{Matrix::Zero(nz, nz), Vector::Zero(nz), 0.0};
  DetectionCoefficients det{Matrix::Zero(nz, nz), Vector::Zero(nz)};
  for (int j = 0; j < j_samples; ++j) {
    RandomStream sub = stream.substream(static_cast<std::uint64_t>(j));
    const GaussianJoint joint = sample_valid(prior, sub);
    const SampledCoefficients s = sampled_coefficients(joint, z_true);
    dis.q += s.dis.q;
    dis.v += s.dis.v;
    dis.c += s.dis.c;
    det.a += s.det.a;
    det.b += s.det.b;
  }
  const double inv_j = 1.0 / j_samples;
  dis.q *= inv_j;
  dis.v *= inv_j;
  dis.c *= inv_j;
  det.a *= inv_j;
  det.b *= inv_j;
  if (sampling_seconds) *sampling_seconds = seconds_since(t0);

  const OptimumValue phi1_star =
      single_objective_optimum(SingleObjective::Phi1, dis, det, region, cfg);
  const OptimumValue phi2_star =
      single_objective_optimum(SingleObjective::Phi2, dis, det, region, cfg);
  const ObjectiveWeights w =
      normalize_weights(u1, phi1_star.value, phi2_star.value,
                        phi1_star.certified, phi2_star.certified);
  return assemble_wb(dis, det, w, region, z_true);
}

SolveReport solve_saa(const Prior& prior, const Vector& z_true, double u1,
                      const BoxRegion& region, int j_samples,
                      const SolveConfig& cfg, RandomStream stream,
                      std::optional<AttackProblem>* problem_out) {
  double sampling_seconds = 0.0;
  AttackProblem problem = saa_assemble(prior, z_true, u1, region, j_samples,
                                       std::move(stream), cfg,
                                       &sampling_seconds);
  SolveReport rep = solve_white_box(problem, cfg);
  rep.method = SolveMethod::SAA;
  rep.j_samples = j_samples;
  rep.sampling_seconds = sampling_seconds;
  if (problem_out) problem_out->emplace(std::move(problem));
  return rep;
}

Vector sga_gradient_sample(const GaussianJoint& joint, const Vector& z_true,
                           const Vector& z, const ObjectiveWeights& weights) {
  const SampledCoefficients s = sampled_coefficients(joint, z_true);
  return 2.0 * ((weights.w1 * s.dis.q - weights.w2 * s.det.a) * z) +
         weights.w1 * s.dis.v + 2.0 * weights.w2 * s.det.b;
}

SolveReport solve_sga(const Prior& prior, const Vector& z_true, double u1,
                      const BoxRegion& region, const SGAConfig& cfg,
                      RandomStream stream, std::vector<Vector>* trace,
                      std::optional<AttackProblem>* problem_out) {
  if (cfg.alpha <= 0.0 || cfg.eps <= 0.0)
    throw std::invalid_argument("solve_sga: alpha and eps must be positive");
  if (cfg.tau1 <= 0.0 || cfg.tau1 >= 1.0 || cfg.tau2 <= 0.0 || cfg.tau2 >= 1.0)
    throw std::invalid_argument("solve_sga: taus must lie in (0, 1)");

  // Weights and the reported objective estimate reuse the Problem GB2
  // machinery on a dedicated substream.
  double sampling_seconds = 0.0;
  const AttackProblem problem =
      saa_assemble(prior, z_true, u1, region, cfg.normalization_samples,
                   stream.substream(0), SolveConfig{.seed = cfg.seed},
                   &sampling_seconds);
  const ObjectiveWeights& weights = problem.weights;

  const auto t0 = Clock::now();
  RandomStream iter_stream = stream.substream(1);
  const int nz = region.dim();
  Vector z = project_box(z_true, region);
  Vector sq_accum = Vector::Zero(nz);  // running (squared) gradient stats
  Vector momentum = Vector::Zero(nz);

  int iterations = 0;
  for (int j = 1; j <= cfg.max_iters; ++j) {
    RandomStream sub = iter_stream.substream(static_cast<std::uint64_t>(j));
    const GaussianJoint joint = sample_valid(prior, sub);
    const Vector r = sga_gradient_sample(joint, z_true, z, weights);

    Vector step(nz);
    switch (cfg.variant) {
      case SGAConfig::Variant::Basic: {
        const double norm = r.norm();
        step = norm > 0.0 ? Vector(cfg.alpha * r / norm) : Vector::Zero(nz);
        break;
      }
      case SGAConfig::Variant::AdaGrad:
        sq_accum += r.cwiseProduct(r);
        step = cfg.alpha *
               r.cwiseQuotient((sq_accum.array() + cfg.eps).sqrt().matrix());
        break;
      case SGAConfig::Variant::RMSProp:
        sq_accum = cfg.tau1 * sq_accum + (1.0 - cfg.tau1) * r.cwiseProduct(r);
        step = cfg.alpha *
               r.cwiseQuotient((sq_accum.array() + cfg.eps).sqrt().matrix());
        break;
      case SGAConfig::Variant::Adam: {
        momentum = cfg.tau2 * momentum + (1.0 - cfg.tau2) * r;
        sq_accum = cfg.tau1 * sq_accum + (1.0 - cfg.tau1) * r.cwiseProduct(r);
        const Vector m_hat = momentum / (1.0 - std::pow(cfg.tau2, j));
        const Vector s_hat = sq_accum / (1.0 - std::pow(cfg.tau1, j));
        step = cfg.alpha *
               m_hat.cwiseQuotient((s_hat.array() + cfg.eps).sqrt().matrix());
        break;
      }
    }

    const Vector z_next = project_box(z + step, region);
    const double moved = (z_next - z).norm();
    z = z_next;
    if (trace) trace->push_back(z);
    iterations = j;
    if (moved <= cfg.stop_delta) break;
  }

  SolveReport rep;
  rep.z_star = std::move(z);
  rep.objective = problem.objective(rep.z_star);
  switch (cfg.variant) {
    case SGAConfig::Variant::Basic: rep.method = SolveMethod::SGABasic; break;
    case SGAConfig::Variant::AdaGrad: rep.method = SolveMethod::SGAAdaGrad; break;
    case SGAConfig::Variant::RMSProp: rep.method = SolveMethod::SGARMSProp; break;
    case SGAConfig::Variant::Adam: rep.method = SolveMethod::SGAAdam; break;
  }
  rep.certified = false;
  rep.iterations = iterations;
  rep.sampling_seconds = sampling_seconds;
  rep.kl_to_truth = problem.kl_at(rep.z_star);
  rep.log_ratio = problem.log_ratio_at(rep.z_star);
  rep.wall_time_seconds = seconds_since(t0);
  if (problem_out) problem_out->emplace(problem);
  return rep;
}

}  // namespace mvgd
