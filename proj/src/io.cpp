#include "mvgd/io.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

namespace mvgd {

void require_keys(const Json& j, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional,
                  const std::string& where) {
  const std::string ctx = where.empty() ? "" : where + ": ";
  if (!j.is_object()) throw SchemaError(ctx + "expected a JSON object");
  for (const auto& key : required)
    if (!j.contains(key)) throw SchemaError(ctx + "missing key '" + key + "'");
  for (const auto& [key, _] : j.items()) {
    const bool known =
        std::find(required.begin(), required.end(), key) != required.end() ||
        std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) throw SchemaError(ctx + "unknown key '" + key + "'");
  }
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

Vector vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw SchemaError(where + ": non-numeric entry");
    v(static_cast<int>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw SchemaError(where + ": expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw SchemaError(where + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        throw SchemaError(where + ": non-numeric entry");
      m(static_cast<int>(r), static_cast<int>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

namespace {

IndexSet index_set_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array");
  IndexSet out;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw SchemaError(where + ": non-integer index");
    out.push_back(e.get<int>());
  }
  return out;
}

Json index_set_to_json(const IndexSet& s) {
  Json out = Json::array();
  for (int i : s) out.push_back(i);
  return out;
}

}  // namespace

Json to_json(const GaussianJoint& joint) {
  return Json{{"mean", to_json(joint.mean())},
              {"cov", to_json(joint.cov())},
              {"y_idx", index_set_to_json(joint.partition().y_idx)},
              {"z_idx", index_set_to_json(joint.partition().z_idx)}};
}

GaussianJoint joint_from_json(const Json& j) {
  require_keys(j, {"mean", "cov", "y_idx", "z_idx"}, {}, "model");
  Partition part{index_set_from_json(j["y_idx"], "model.y_idx"),
                 index_set_from_json(j["z_idx"], "model.z_idx")};
  const Vector mean = vector_from_json(j["mean"], "model.mean");
  const Matrix cov = matrix_from_json(j["cov"], "model.cov");
  const ValidationReport rep = validate_joint(mean, cov, part);
  if (!rep.ok) throw SchemaError("model: " + rep.reason);
  return GaussianJoint(mean, cov, part);
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return j;
}

GaussianJoint load_joint(const std::string& path) {
  return joint_from_json(load_json_file(path));
}

void save_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

BoxRegion region_from_json(const Json& j, const Vector& center) {
  if (j.contains("lower") || j.contains("upper")) {
    require_keys(j, {"lower", "upper"}, {}, "region");
    return BoxRegion(vector_from_json(j["lower"], "region.lower"),
                     vector_from_json(j["upper"], "region.upper"));
  }
  if (j.contains("half_width")) {
    require_keys(j, {"half_width"}, {}, "region");
    return BoxRegion::around(center, j["half_width"].get<double>());
  }
  if (j.contains("fraction")) {
    require_keys(j, {"fraction"}, {}, "region");
    return BoxRegion::fraction_of(center, j["fraction"].get<double>());
  }
  throw SchemaError("region: expected lower/upper, half_width or fraction");
}

NIWParams niw_params_from_json(const Json& j, const std::string& where) {
  require_keys(j, {"mu0", "kappa", "psi", "nu"}, {}, where);
  NIWParams p;
  p.mu0 = vector_from_json(j["mu0"], where + ".mu0");
  p.kappa = j["kappa"].get<double>();
  p.psi = matrix_from_json(j["psi"], where + ".psi");
  p.nu = j["nu"].get<double>();
  return p;
}

RegressionSpec regression_spec_from_json(const Json& j) {
  require_keys(j, {"beta0", "beta", "sigma2", "mu_z", "sigma_zz"}, {},
               "regression spec");
  RegressionSpec spec;
  spec.beta0 = j["beta0"].get<double>();
  spec.beta = vector_from_json(j["beta"], "regression.beta");
  spec.sigma2 = j["sigma2"].get<double>();
  spec.mu_z = vector_from_json(j["mu_z"], "regression.mu_z");
  spec.sigma_zz = matrix_from_json(j["sigma_zz"], "regression.sigma_zz");
  return spec;
}

LGSSMSpec lgssm_spec_from_json(const Json& j) {
  require_keys(j, {"horizon", "dt", "init_means", "init_vars", "trans_vars",
                   "obs_vars"},
               {}, "lgssm spec");
  LGSSMSpec spec;
  spec.horizon = j["horizon"].get<int>();
  spec.dt = j["dt"].get<double>();
  spec.init_means = vector_from_json(j["init_means"], "lgssm.init_means");
  spec.init_vars = vector_from_json(j["init_vars"], "lgssm.init_vars");
  spec.trans_vars = vector_from_json(j["trans_vars"], "lgssm.trans_vars");
  spec.obs_vars = vector_from_json(j["obs_vars"], "lgssm.obs_vars");
  return spec;
}

std::unique_ptr<Prior> prior_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type"))
    throw SchemaError("prior: missing 'type'");
  const std::string type = j["type"].get<std::string>();

  if (type == "point-mass") {
    require_keys(j, {"type", "joint"}, {}, "prior");
    return std::make_unique<PointMassPrior>(joint_from_json(j["joint"]));
  }
  if (type == "niw") {
    require_keys(j, {"type", "mu0", "kappa", "psi", "nu", "y_idx", "z_idx"},
                 {}, "prior");
    NIWParams p;
    p.mu0 = vector_from_json(j["mu0"], "prior.mu0");
    p.kappa = j["kappa"].get<double>();
    p.psi = matrix_from_json(j["psi"], "prior.psi");
    p.nu = j["nu"].get<double>();
    Partition part{index_set_from_json(j["y_idx"], "prior.y_idx"),
                   index_set_from_json(j["z_idx"], "prior.z_idx")};
    return std::make_unique<NIWPrior>(std::move(p), std::move(part));
  }
  if (type == "regression-hierarchy") {
    require_keys(j, {"type", "predictor", "sigma2_ig", "beta0_center",
                     "beta_center"},
                 {}, "prior");
    RegressionBeliefs b;
    b.predictor = niw_params_from_json(j["predictor"], "prior.predictor");
    const auto& ig = j["sigma2_ig"];
    if (!ig.is_array() || ig.size() != 2)
      throw SchemaError("prior.sigma2_ig: expected [shape, scale]");
    b.sigma2_shape = ig[0].get<double>();
    b.sigma2_scale = ig[1].get<double>();
    b.beta0_center = j["beta0_center"].get<double>();
    b.beta_center = vector_from_json(j["beta_center"], "prior.beta_center");
    return build_regression_prior(std::move(b));
  }
  if (type == "lgssm") {
    require_keys(j, {"type", "truth"},
                 {"mean_belief_variance", "sample_variances", "var_floor"},
                 "prior");
    LGSSMBeliefs b;
    b.truth = lgssm_spec_from_json(j["truth"]);
    if (j.contains("mean_belief_variance"))
      b.mean_belief_variance = j["mean_belief_variance"].get<double>();
    if (j.contains("sample_variances"))
      b.sample_variances = j["sample_variances"].get<bool>();
    if (j.contains("var_floor")) b.var_floor = j["var_floor"].get<double>();
    return build_lgssm_prior(std::move(b));
  }
  throw SchemaError("prior: unknown type '" + type + "'");
}

std::unique_ptr<Prior> load_prior(const std::string& path) {
  return prior_from_json(load_json_file(path));
}

Json to_json(const AttackProblem& p) {
  return Json{{"H", to_json(p.h)},
              {"g", to_json(p.g)},
              {"Q", to_json(p.dis.q)},
              {"v", to_json(p.dis.v)},
              {"c", p.dis.c},
              {"A", to_json(p.det.a)},
              {"b", to_json(p.det.b)},
              {"region", Json{{"lower", to_json(p.region.lower)},
                              {"upper", to_json(p.region.upper)}}},
              {"truth_evidence", to_json(p.truth_evidence)},
              {"weights", Json{{"u1", p.weights.u1},
                               {"u2", p.weights.u2},
                               {"phi1_star", p.weights.phi1_star},
                               {"phi2_star", p.weights.phi2_star},
                               {"w1", p.weights.w1},
                               {"w2", p.weights.w2},
                               {"phi1_certified", p.weights.phi1_certified},
                               {"phi2_certified", p.weights.phi2_certified}}}};
}

Json to_json(const SolveReport& r) {
  Json out{{"z_star", to_json(r.z_star)},
           {"objective", r.objective},
           {"method", to_string(r.method)},
           {"certified", r.certified},
           {"iterations", r.iterations},
           {"wall_time_seconds", r.wall_time_seconds},
           {"sampling_seconds", r.sampling_seconds}};
  if (r.classification) out["classification"] = to_string(*r.classification);
  if (r.kl_to_truth) out["kl_to_truth"] = *r.kl_to_truth;
  if (r.log_ratio) out["log_ratio"] = *r.log_ratio;
  if (r.j_samples) out["j_samples"] = *r.j_samples;
  return out;
}

Json to_json(const ConvexityReport& r) {
  Json out{{"rho", r.rho},
           {"zeta", r.zeta},
           {"lambda_h", r.lambda_h},
           {"classification", to_string(r.classification)},
           {"u1_minus", r.u1_minus},
           {"u1_plus", r.u1_plus}};
  if (r.u1_tilde_minus) out["u1_tilde_minus"] = *r.u1_tilde_minus;
  if (r.u1_tilde_plus) out["u1_tilde_plus"] = *r.u1_tilde_plus;
  return out;
}

Json to_json(const EvaluationRow& row) {
  return Json{{"attack", row.attack_name},
              {"variant", row.variant},
              {"hyperparams", row.hyperparams},
              {"z", to_json(row.z)},
              {"objective_value", row.objective_value},
              {"objective_value_wb", row.objective_value_wb},
              {"kl_to_truth", row.kl_to_truth},
              {"log_ratio", row.log_ratio},
              {"modal_estimate", to_json(row.modal_estimate)},
              {"comp_seconds", row.comp_seconds},
              {"sampling_seconds", row.sampling_seconds},
              {"seed", row.seed}};
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw IoError("write_csv: row width mismatch for " + path);
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "\n");
  }
}

}  // namespace mvgd
