#include "mvgd/models.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mvgd {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Linear-Gaussian node appended to a joint under construction.
struct NodeSpec {
  std::vector<std::pair<int, double>> parents;  // (index, coefficient)
  double mean_offset = 0.0;
  double noise_var = 0.0;
};

void append_node(Vector& mean, Matrix& cov, int i, const NodeSpec& node) {
  double m = node.mean_offset;
  for (auto [p, c] : node.parents) m += c * mean(p);
  mean(i) = m;

  for (int j = 0; j < i; ++j) {
    double cij = 0.0;
    for (auto [p, c] : node.parents) cij += c * cov(p, j);
    cov(i, j) = cov(j, i) = cij;
  }
  double var = node.noise_var;
  for (auto [p, c] : node.parents)
    for (auto [q, d] : node.parents) var += c * d * cov(p, q);
  cov(i, i) = var;
}

}  // namespace

GaussianJoint fit_mle(const DataMatrix& data, const Partition& partition) {
  const int n = data.n_rows();
  const int d = data.n_cols();
  if (n < d + 1)
    throw ValidationError("fit_mle: need at least variables+1 observations");

  const Vector mean = data.rows.colwise().mean();
  const Matrix centered = data.rows.rowwise() - mean.transpose();
  // Maximum-likelihood (1/N) normalization.
  const Matrix cov = symmetrized(centered.transpose() * centered / n);

  const ValidationReport rep = validate_joint(mean, cov, partition);
  if (!rep.ok && (rep.reason == "not PD" || rep.reason == "asymmetric"))
    throw ValidationError("fit_mle: sample covariance is rank-deficient");
  return GaussianJoint(mean, cov, partition);
}

GaussianJoint regression_to_joint(const RegressionSpec& spec) {
  const int nz = spec.nz();
  if (spec.sigma2 <= 0.0)
    throw ValidationError("regression_to_joint: sigma2 must be positive");
  if (spec.mu_z.size() != nz || spec.sigma_zz.rows() != nz ||
      spec.sigma_zz.cols() != nz)
    throw DimensionError("regression_to_joint: predictor model shape mismatch");

  const int n = nz + 1;
  Vector mean(n);
  mean.head(nz) = spec.mu_z;
  mean(nz) = spec.beta0 + spec.beta.dot(spec.mu_z);

  Matrix cov(n, n);
  cov.topLeftCorner(nz, nz) = spec.sigma_zz;
  const Vector cross = spec.sigma_zz * spec.beta;  // Sigma_{Z_i Y}
  cov.block(0, nz, nz, 1) = cross;
  cov.block(nz, 0, 1, nz) = cross.transpose();
  cov(nz, nz) = spec.sigma2 + spec.beta.dot(spec.sigma_zz * spec.beta);

  Partition part;
  for (int i = 0; i < nz; ++i) part.z_idx.push_back(i);
  part.y_idx.push_back(nz);
  return GaussianJoint(std::move(mean), symmetrized(cov), std::move(part));
}

int lgssm_obs_index(int k, int t) { return kLgssmNodesPerSlice * t + 4 + k; }

Vector lgssm_evidence(const std::vector<double>& z1,
                      const std::vector<double>& z2) {
  if (z1.size() != z2.size())
    throw DimensionError("lgssm_evidence: sensor series lengths differ");
  Vector out(2 * z1.size());
  for (std::size_t t = 0; t < z1.size(); ++t) {
    out(2 * t) = z1[t];
    out(2 * t + 1) = z2[t];
  }
  return out;
}

GaussianJoint lgssm_unroll(const LGSSMSpec& spec) {
  if (spec.horizon < 0)
    throw ValidationError("lgssm_unroll: horizon must be >= 0");
  if (spec.init_means.size() != 4 || spec.init_vars.size() != 4 ||
      spec.trans_vars.size() != 4 || spec.obs_vars.size() != 2)
    throw DimensionError("lgssm_unroll: parameter vector lengths");
  for (int i = 0; i < 4; ++i)
    if (spec.init_vars(i) <= 0.0 || spec.trans_vars(i) <= 0.0)
      throw ValidationError("lgssm_unroll: variances must be positive");
  for (int i = 0; i < 2; ++i)
    if (spec.obs_vars(i) <= 0.0)
      throw ValidationError("lgssm_unroll: variances must be positive");

  const int slices = spec.horizon + 1;
  const int n = kLgssmNodesPerSlice * slices;
  Vector mean = Vector::Zero(n);
  Matrix cov = Matrix::Zero(n, n);

  for (int t = 0; t < slices; ++t) {
    const int base = kLgssmNodesPerSlice * t;
    const int prev = base - kLgssmNodesPerSlice;
    for (int k = 0; k < 2; ++k) {
      NodeSpec pos, vel;
      if (t == 0) {
        pos.mean_offset = spec.init_means(k);
        pos.noise_var = spec.init_vars(k);
        vel.mean_offset = spec.init_means(2 + k);
        vel.noise_var = spec.init_vars(2 + k);
      } else {
        pos.parents = {{prev + k, 1.0}, {prev + 2 + k, spec.dt}};
        pos.noise_var = spec.trans_vars(k);
        vel.parents = {{prev + 2 + k, 1.0}};
        vel.noise_var = spec.trans_vars(2 + k);
      }
      append_node(mean, cov, base + k, pos);
      append_node(mean, cov, base + 2 + k, vel);
    }
    for (int k = 0; k < 2; ++k) {
      NodeSpec obs;
      obs.parents = {{base + k, 1.0}};
      obs.noise_var = spec.obs_vars(k);
      append_node(mean, cov, base + 4 + k, obs);
    }
  }

  Partition part;
  for (int t = 0; t < slices; ++t) {
    const int base = kLgssmNodesPerSlice * t;
    for (int k = 0; k < 4; ++k) part.y_idx.push_back(base + k);
    for (int k = 0; k < 2; ++k) part.z_idx.push_back(base + 4 + k);
  }
  return GaussianJoint(std::move(mean), std::move(cov), std::move(part));
}

RegressionPrior::RegressionPrior(RegressionBeliefs beliefs)
    : beliefs_(std::move(beliefs)) {
  if (beliefs_.sigma2_shape <= 0.0 || beliefs_.sigma2_scale <= 0.0)
    throw ValidationError("RegressionPrior: inverse-gamma hyperparameters");
  if (beliefs_.beta_center.size() != beliefs_.predictor.dim())
    throw DimensionError("RegressionPrior: beta center length");
}

GaussianJoint RegressionPrior::sample(RandomStream& stream) const {
  RegressionSpec spec;
  const MomentParams pz = niw_sample(beliefs_.predictor, stream);
  spec.mu_z = pz.mean;
  spec.sigma_zz = pz.cov;
  spec.sigma2 =
      stream.inverse_gamma(beliefs_.sigma2_shape, beliefs_.sigma2_scale);
  const double sd = std::sqrt(spec.sigma2);
  spec.beta0 = beliefs_.beta0_center + sd * stream.normal01();
  spec.beta = beliefs_.beta_center;
  for (int i = 0; i < spec.beta.size(); ++i)
    spec.beta(i) += sd * stream.normal01();
  return regression_to_joint(spec);
}

LGSSMPrior::LGSSMPrior(LGSSMBeliefs beliefs) : beliefs_(std::move(beliefs)) {
  lgssm_unroll(beliefs_.truth);  // reject invalid truth specs up front
}

GaussianJoint LGSSMPrior::sample(RandomStream& stream) const {
  LGSSMSpec spec = beliefs_.truth;
  const double sd = std::sqrt(beliefs_.mean_belief_variance);
  for (int i = 0; i < 4; ++i)
    spec.init_means(i) += sd * stream.normal01();
  if (beliefs_.sample_variances) {
    auto draw = [&](double true_var) {
      return std::max(beliefs_.var_floor, stream.inverse_gamma(2.0, true_var));
    };
    for (int i = 0; i < 4; ++i) spec.init_vars(i) = draw(spec.init_vars(i));
    for (int i = 0; i < 4; ++i) spec.trans_vars(i) = draw(spec.trans_vars(i));
    for (int i = 0; i < 2; ++i) spec.obs_vars(i) = draw(spec.obs_vars(i));
  }
  return lgssm_unroll(spec);
}

std::unique_ptr<Prior> build_regression_prior(RegressionBeliefs beliefs) {
  return std::make_unique<RegressionPrior>(std::move(beliefs));
}

std::unique_ptr<Prior> build_lgssm_prior(LGSSMBeliefs beliefs) {
  return std::make_unique<LGSSMPrior>(std::move(beliefs));
}

DataMatrix load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw SchemaError("load_csv: missing header row in " + path);
  DataMatrix data;
  for (const std::string& name : split_csv_line(line))
    data.column_names.push_back(trim(name));
  const int d = static_cast<int>(data.column_names.size());
  if (d == 0) throw SchemaError("load_csv: empty header in " + path);

  std::vector<Vector> parsed;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != d)
      throw SchemaError("load_csv: row " + std::to_string(row_no) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(d));
    Vector row(d);
    for (int c = 0; c < d; ++c) {
      const std::string cell = trim(cells[c]);
      double value = 0.0;
      const auto* begin = cell.data();
      const auto* end = begin + cell.size();
      const auto [ptr, ec] = std::from_chars(begin, end, value);
      if (cell.empty() || ec != std::errc() || ptr != end)
        throw SchemaError("load_csv: non-numeric cell at row " +
                          std::to_string(row_no) + ", column " +
                          std::to_string(c + 1) + " (" +
                          data.column_names[c] + ")");
      row(c) = value;
    }
    parsed.push_back(std::move(row));
  }
  if (parsed.empty()) throw SchemaError("load_csv: no data rows in " + path);

  data.rows.resize(static_cast<int>(parsed.size()), d);
  for (std::size_t r = 0; r < parsed.size(); ++r)
    data.rows.row(static_cast<int>(r)) = parsed[r].transpose();
  return data;
}

}  // namespace mvgd
