#pragma once

#include <string>
#include <vector>

#include "mvgd/greybox.hpp"

namespace mvgd {

struct DataMatrix {
  Matrix rows;  // observations x variables
  std::vector<std::string> column_names;

  int n_rows() const { return static_cast<int>(rows.rows()); }
  int n_cols() const { return static_cast<int>(rows.cols()); }
};

/// Y | z ~ N(beta0 + beta'z, sigma2) on top of Z ~ N(mu_z, sigma_zz).
struct RegressionSpec {
  double beta0 = 0.0;
  Vector beta;
  double sigma2 = 1.0;
  Vector mu_z;
  Matrix sigma_zz;

  int nz() const { return static_cast<int>(beta.size()); }
};

/// Constant-velocity planar tracker unrolled over t = 0..horizon.
/// State nodes per slice: positions, then velocities; two position sensors.
struct LGSSMSpec {
  int horizon = 10;  // |T| - 1
  double dt = 1.0;
  Vector init_means;  // [y1, y2, y1dot, y2dot]
  Vector init_vars;
  Vector trans_vars;  // [y1, y2, y1dot, y2dot]
  Vector obs_vars;    // [z1, z2]
};

inline constexpr int kLgssmNodesPerSlice = 6;

GaussianJoint fit_mle(const DataMatrix& data, const Partition& partition);

/// Joint over (Z..., Y) implied by the regression; Y is the last variable.
GaussianJoint regression_to_joint(const RegressionSpec& spec);

/// Unrolled 2TBN joint, time-major with slice layout
/// [Y1, Y2, Y1dot, Y2dot, Z1, Z2]; Z = sensors, Y = states.
GaussianJoint lgssm_unroll(const LGSSMSpec& spec);

/// Index of observation Z_{k,t} (k in {0,1}) within the unrolled joint.
int lgssm_obs_index(int k, int t);

/// Flattened true-evidence vector in unroll order from per-sensor series.
Vector lgssm_evidence(const std::vector<double>& z1,
                      const std::vector<double>& z2);

struct RegressionBeliefs {
  NIWParams predictor;       // prior over (mu_Z, Sigma_ZZ)
  double sigma2_shape = 4.0; // inverse-gamma, shape-scale convention
  double sigma2_scale = 2.0;
  double beta0_center = 0.0; // (beta0, beta) ~ N(center, sigma2 I)
  Vector beta_center;
};

class RegressionPrior final : public Prior {
 public:
  explicit RegressionPrior(RegressionBeliefs beliefs);
  GaussianJoint sample(RandomStream& stream) const override;
  std::string name() const override { return "regression-hierarchy"; }
  const RegressionBeliefs& beliefs() const { return beliefs_; }

 private:
  RegressionBeliefs beliefs_;
};

struct LGSSMBeliefs {
  LGSSMSpec truth;
  // N(true, mean_belief_variance) beliefs for the four initial means; all
  // unknown variances are IG(2, true) so beliefs are correct in expectation.
  double mean_belief_variance = 1.0;
  bool sample_variances = true;
  double var_floor = 1e-8;
};

class LGSSMPrior final : public Prior {
 public:
  explicit LGSSMPrior(LGSSMBeliefs beliefs);
  GaussianJoint sample(RandomStream& stream) const override;
  std::string name() const override { return "lgssm"; }
  const LGSSMBeliefs& beliefs() const { return beliefs_; }

 private:
  LGSSMBeliefs beliefs_;
};

std::unique_ptr<Prior> build_regression_prior(RegressionBeliefs beliefs);
std::unique_ptr<Prior> build_lgssm_prior(LGSSMBeliefs beliefs);

/// Strict CSV reader: header row, comma separated, every cell numeric.
DataMatrix load_csv(const std::string& path);

}  // namespace mvgd
