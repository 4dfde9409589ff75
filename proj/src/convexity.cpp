#include "mvgd/convexity.hpp"

#include <algorithm>
#include <cmath>

namespace mvgd {

namespace {

std::vector<double> spectrum_non_ascending(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m),
                                           Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(),
                          es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end(), std::greater<double>());
  return out;
}

Matrix h_of_u1(const DisruptionCoefficients& dis,
               const DetectionCoefficients& det, double abs_phi1,
               double abs_phi2, double u1) {
  return (u1 / abs_phi1) * dis.q - ((1.0 - u1) / abs_phi2) * det.a;
}

struct SpectrumEdge {
  double lmin;
  double lmax;
  double tol;
};

SpectrumEdge edge_eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(h),
                                           Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  const double radius = std::max(std::abs(lmin), std::abs(lmax));
  return {lmin, lmax, kSpecTol * radius};
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

std::string to_string(Curvature c) {
  switch (c) {
    case Curvature::Concave: return "concave";
    case Curvature::Convex: return "convex";
    default: return "indefinite";
  }
}

Curvature classify(const Matrix& h) {
  const SpectrumEdge e = edge_eigenvalues(h);
  if (e.lmax <= e.tol) return Curvature::Concave;
  if (e.lmin >= -e.tol) return Curvature::Convex;
  return Curvature::Indefinite;
}

Curvature classify(const AttackProblem& problem) { return classify(problem.h); }

std::pair<double, double> weyl_bounds(const DisruptionCoefficients& dis,
                                      const DetectionCoefficients& det,
                                      double phi1_star, double phi2_star) {
  const double a1 = std::abs(phi1_star);
  const double a2 = std::abs(phi2_star);
  if (a1 <= kWeightEps || a2 <= kWeightEps)
    throw DegenerateNormalization("weyl_bounds: |phi*| below weight_eps");

  const std::vector<double> rho = spectrum_non_ascending(dis.q);
  const std::vector<double> zeta = spectrum_non_ascending(det.a);
  const int n = static_cast<int>(zeta.size());

  // Transition value of u1 at which w1 rho_m - w2 zeta_n changes sign.
  auto t = [&](int m, int nn) {
    const double r = std::max(rho[m - 1], 0.0) / a1;
    const double zt = zeta[nn - 1] / a2;
    return zt / (r + zt);
  };

  double lo = 1.0;
  double hi = 0.0;
  for (int m = 1; m <= n; ++m) {
    for (int nn = 1; nn <= n; ++nn) {
      const int weyl_upper = m + nn - 1;
      const int weyl_lower = m + nn - n;
      if (weyl_upper >= 1 && weyl_upper <= n) lo = std::min(lo, t(m, nn));
      if (weyl_lower >= 1 && weyl_lower <= n) hi = std::max(hi, t(m, nn));
    }
  }
  return {std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0)};
}

std::pair<double, double> brute_force_transition(
    const DisruptionCoefficients& dis, const DetectionCoefficients& det,
    double phi1_star, double phi2_star, double step) {
  if (step <= 0.0)
    throw std::invalid_argument("brute_force_transition: step must be > 0");
  const double a1 = std::abs(phi1_star);
  const double a2 = std::abs(phi2_star);

  const int k = static_cast<int>(std::lround(1.0 / step));
  double last_concave = 0.0;
  double first_convex = 1.0;
  bool convex_seen = false;
  for (int i = 0; i <= k; ++i) {
    const double u1 = std::min(1.0, i * step);
    const SpectrumEdge e = edge_eigenvalues(h_of_u1(dis, det, a1, a2, u1));
    if (e.lmax <= e.tol) last_concave = u1;
    if (!convex_seen && e.lmin >= -e.tol) {
      first_convex = u1;
      convex_seen = true;
    }
  }

  double lo = last_concave >= 1.0 ? 1.0 : last_concave + 0.5 * step;
  double hi = first_convex <= 0.0 ? 0.0 : first_convex - 0.5 * step;
  if (hi < lo) lo = hi = std::max(lo, hi);
  return {lo, hi};
}

ConvexityReport analyze_convexity(const AttackProblem& problem,
                                  bool brute_force, double step) {
  ConvexityReport rep;
  rep.rho = spectrum_non_ascending(problem.dis.q);
  rep.zeta = spectrum_non_ascending(problem.det.a);
  rep.lambda_h = spectrum_non_ascending(problem.h);
  rep.classification = classify(problem.h);
  std::tie(rep.u1_minus, rep.u1_plus) =
      weyl_bounds(problem.dis, problem.det, problem.weights.phi1_star,
                  problem.weights.phi2_star);
  if (brute_force) {
    auto [lo, hi] =
        brute_force_transition(problem.dis, problem.det,
                               problem.weights.phi1_star,
                               problem.weights.phi2_star, step);
    rep.u1_tilde_minus = lo;
    rep.u1_tilde_plus = hi;
  }
  return rep;
}

OvercoverageSummary overcoverage_study(CovSampler sampler, int n, int nz,
                                       double phi1_star, double phi2_star,
                                       int trials, RandomStream stream,
                                       double step) {
  if (trials < 1)
    throw std::invalid_argument("overcoverage_study: trials must be >= 1");
  const int ny = n - nz;
  if (ny < 1 || nz < 1)
    throw std::invalid_argument("overcoverage_study: need |Y| >= 1, |Z| >= 1");

  OvercoverageSummary sum;
  sum.sampler = sampler;
  sum.n = n;
  sum.nz = nz;
  sum.phi1_star = phi1_star;
  sum.phi2_star = phi2_star;
  sum.trials = trials;
  sum.per_trial.reserve(trials);

  Partition part;
  for (int i = 0; i < ny; ++i) part.y_idx.push_back(i);
  for (int i = ny; i < n; ++i) part.z_idx.push_back(i);

  for (int t = 0; t < trials; ++t) {
    RandomStream sub = stream.substream(static_cast<std::uint64_t>(t));
    Matrix sigma;
    // A bad draw (validation-rejected) is retried on a derived stream.
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 100)
        throw RetryLimitError("overcoverage_study: sampler retries exhausted");
      sigma = sampler == CovSampler::GGT
                  ? ggt_covariance(n, sub)
                  : inv_wishart_sample(Matrix::Identity(n, n),
                                       static_cast<double>(n), sub);
      if (validate_joint(Vector::Zero(n), sigma, part).ok) break;
    }

    GaussianJoint joint(Vector::Zero(n), sigma, part);
    const DisruptionCoefficients dis =
        build_disruption(joint, Vector::Zero(nz));
    const DetectionCoefficients det = build_detection(joint);
    auto [lo, hi] = weyl_bounds(dis, det, phi1_star, phi2_star);
    auto [blo, bhi] =
        brute_force_transition(dis, det, phi1_star, phi2_star, step);
    sum.per_trial.push_back((hi - lo) - (bhi - blo));
  }

  sum.median = quantile(sum.per_trial, 0.5);
  sum.q25 = quantile(sum.per_trial, 0.25);
  sum.q75 = quantile(sum.per_trial, 0.75);
  sum.min = *std::min_element(sum.per_trial.begin(), sum.per_trial.end());
  return sum;
}

}  // namespace mvgd
