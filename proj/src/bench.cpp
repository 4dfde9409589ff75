#include "mvgd/bench.hpp"

#include <algorithm>
#include <filesystem>
#include <nlohmann/json.hpp>

#include "mvgd/io.hpp"

namespace mvgd {

namespace fs = std::filesystem;

AttackProblem WhiteBoxFamily::assemble(double u1) const {
  const ObjectiveWeights w =
      normalize_weights(u1, phi1_star.value, phi2_star.value,
                        phi1_star.certified, phi2_star.certified);
  return assemble_wb(dis, det, w, region, z_true);
}

WhiteBoxFamily make_family(const GaussianJoint& joint, const Vector& z_true,
                           const BoxRegion& region, const SolveConfig& cfg) {
  DisruptionCoefficients dis = build_disruption(joint, z_true);
  DetectionCoefficients det = build_detection(joint);
  OptimumValue p1 =
      single_objective_optimum(SingleObjective::Phi1, dis, det, region, cfg);
  OptimumValue p2 =
      single_objective_optimum(SingleObjective::Phi2, dis, det, region, cfg);
  return WhiteBoxFamily{std::move(dis), std::move(det), std::move(p1),
                        std::move(p2), region, z_true};
}

Vector rn_baseline(const Vector& z_true, const BoxRegion& region,
                   RandomStream& stream) {
  if (z_true.size() != region.lower.size())
    throw DimensionError("rn_baseline: dimension mismatch");
  Vector z(z_true.size());
  for (int i = 0; i < z.size(); ++i)
    z(i) = z_true(i) + stream.uniform(region.lower(i) - z_true(i),
                                      region.upper(i) - z_true(i));
  return z;
}

std::vector<double> default_u1_grid() {
  std::vector<double> grid{0.01};
  for (int k = 1; k <= 19; ++k) grid.push_back(0.05 * k);
  grid.push_back(0.99);
  return grid;
}

std::vector<ParetoPoint> pareto_sweep(const WhiteBoxFamily& family,
                                      const std::vector<double>& u1_grid,
                                      const SolveConfig& cfg) {
  std::vector<ParetoPoint> points;
  points.reserve(u1_grid.size());
  for (double u1 : u1_grid) {
    if (!(u1 > 0.0 && u1 < 1.0))
      throw ValidationError("pareto_sweep: grid values must lie in (0, 1)");
    const AttackProblem problem = family.assemble(u1);
    const SolveReport rep = solve_white_box(problem, cfg);
    ParetoPoint p;
    p.u1 = u1;
    p.z = rep.z_star;
    p.disruption = problem.kl_at(p.z);
    p.risk = -problem.log_ratio_at(p.z);
    points.push_back(std::move(p));
  }
  // Dominance: more disruption at no more risk dominates.
  for (auto& a : points) {
    a.dominated = std::any_of(
        points.begin(), points.end(), [&](const ParetoPoint& b) {
          const bool no_worse =
              b.disruption >= a.disruption && b.risk <= a.risk;
          const bool strictly_better =
              b.disruption > a.disruption || b.risk < a.risk;
          return no_worse && strictly_better;
        });
  }
  return points;
}

EvaluationRow evaluate_attack(const GaussianJoint& j_truth,
                              const Vector& z_true, const Vector& z,
                              const AttackProblem& problem,
                              const AttackProblem* wb_problem) {
  if (!problem.region.contains(z))
    throw ValidationError("evaluate_attack: z outside the feasible region");

  EvaluationRow row;
  row.z = z;
  row.objective_value = problem.objective(z);
  row.objective_value_wb =
      wb_problem ? wb_problem->objective(z) : row.objective_value;
  row.kl_to_truth = eval_kl_to_truth(j_truth, z_true, z);

  const MomentParams mz = marginal_z(j_truth);
  const Vector d = z - mz.mean;
  row.log_ratio =
      -0.5 * d.dot(cholesky_or_throw(mz.cov, "evaluate_attack").solve(d));
  row.modal_estimate = condition(j_truth, z).mean;
  return row;
}

namespace {

struct SgaSpec {
  SGAConfig cfg;
  std::string hyperparams;
};

SgaSpec sga_from_json(const Json& j, std::uint64_t seed) {
  require_keys(j, {"variant", "alpha", "eps"},
               {"tau1", "tau2", "max_iters", "stop_delta",
                "normalization_samples"},
               "sga");
  SgaSpec out;
  const std::string variant = j["variant"].get<std::string>();
  if (variant == "basic") out.cfg.variant = SGAConfig::Variant::Basic;
  else if (variant == "adagrad") out.cfg.variant = SGAConfig::Variant::AdaGrad;
  else if (variant == "rmsprop") out.cfg.variant = SGAConfig::Variant::RMSProp;
  else if (variant == "adam") out.cfg.variant = SGAConfig::Variant::Adam;
  else throw SchemaError("sga: unknown variant '" + variant + "'");

  out.cfg.alpha = j["alpha"].get<double>();
  out.cfg.eps = j["eps"].get<double>();
  if (j.contains("tau1")) out.cfg.tau1 = j["tau1"].get<double>();
  if (j.contains("tau2")) out.cfg.tau2 = j["tau2"].get<double>();
  if (j.contains("max_iters")) out.cfg.max_iters = j["max_iters"].get<int>();
  if (j.contains("stop_delta"))
    out.cfg.stop_delta = j["stop_delta"].get<double>();
  if (j.contains("normalization_samples"))
    out.cfg.normalization_samples = j["normalization_samples"].get<int>();
  out.cfg.seed = seed;

  // Semicolon-separated so the CSV cell needs no quoting.
  std::string hp = "{" + format_double(out.cfg.alpha) + "; " +
                   format_double(out.cfg.eps);
  if (out.cfg.variant == SGAConfig::Variant::RMSProp ||
      out.cfg.variant == SGAConfig::Variant::Adam)
    hp += "; " + format_double(out.cfg.tau1);
  if (out.cfg.variant == SGAConfig::Variant::Adam)
    hp += "; " + format_double(out.cfg.tau2);
  out.hyperparams = hp + "}";
  return out;
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
  fs::path path(p);
  if (path.is_absolute()) return p;
  return (fs::path(base_dir) / path).string();
}

struct AppSetup {
  GaussianJoint joint;
  Vector z_true;
  BoxRegion region;
  std::unique_ptr<Prior> prior;
};

const Json& member(const Json& cfg, const char* key) {
  if (!cfg.contains(key))
    throw SchemaError(std::string("config: missing key '") + key + "'");
  return cfg.at(key);
}

AppSetup setup_zhvi(const Json& cfg, const std::string& base_dir) {
  require_keys(member(cfg, "model"), {"data", "y_idx", "z_idx"}, {}, "model");
  require_keys(member(cfg, "prior"), {"kappa", "nu"}, {}, "prior");

  const Json& model = cfg.at("model");
  const DataMatrix data =
      load_csv(resolve_path(base_dir, model.at("data").get<std::string>()));
  Partition part;
  for (const auto& i : model.at("y_idx")) part.y_idx.push_back(i.get<int>());
  for (const auto& i : model.at("z_idx")) part.z_idx.push_back(i.get<int>());
  GaussianJoint joint = fit_mle(data, part);

  Vector z_true = vector_from_json(member(cfg, "true_evidence"), "true_evidence");
  BoxRegion region = region_from_json(member(cfg, "region"), z_true);

  NIWParams p;
  p.mu0 = joint.mean();
  p.psi = joint.cov();
  p.kappa = cfg.at("prior").at("kappa").get<double>();
  p.nu = cfg.at("prior").at("nu").get<double>();
  auto prior = std::make_unique<NIWPrior>(std::move(p), joint.partition());
  return {std::move(joint), std::move(z_true), std::move(region),
          std::move(prior)};
}

AppSetup setup_loan(const Json& cfg, const std::string& base_dir) {
  require_keys(member(cfg, "model"), {"spec"}, {}, "model");
  require_keys(member(cfg, "prior"), {"kappa", "nu", "sigma2_ig"}, {}, "prior");
  const RegressionSpec spec = regression_spec_from_json(load_json_file(
      resolve_path(base_dir, cfg.at("model").at("spec").get<std::string>())));
  GaussianJoint joint = regression_to_joint(spec);

  Vector z_true = vector_from_json(member(cfg, "true_evidence"), "true_evidence");
  BoxRegion region = region_from_json(member(cfg, "region"), z_true);

  RegressionBeliefs b;
  b.predictor.mu0 = spec.mu_z;
  b.predictor.psi = spec.sigma_zz;
  const Json& prior_cfg = cfg.at("prior");
  b.predictor.kappa = prior_cfg.at("kappa").get<double>();
  b.predictor.nu = prior_cfg.at("nu").get<double>();
  b.sigma2_shape = prior_cfg.at("sigma2_ig").at(0).get<double>();
  b.sigma2_scale = prior_cfg.at("sigma2_ig").at(1).get<double>();
  b.beta0_center = spec.beta0;
  b.beta_center = spec.beta;
  return {std::move(joint), std::move(z_true), std::move(region),
          build_regression_prior(std::move(b))};
}

AppSetup setup_lgssm(const Json& cfg, const std::string& base_dir,
                     double q_override = -1.0) {
  require_keys(member(cfg, "model"), {"spec"}, {}, "model");
  const LGSSMSpec spec = lgssm_spec_from_json(load_json_file(
      resolve_path(base_dir, cfg.at("model").at("spec").get<std::string>())));
  GaussianJoint joint = lgssm_unroll(spec);

  require_keys(member(cfg, "observations"), {"z1", "z2"}, {}, "observations");
  std::vector<double> z1, z2;
  for (const auto& v : cfg.at("observations").at("z1")) z1.push_back(v.get<double>());
  for (const auto& v : cfg.at("observations").at("z2")) z2.push_back(v.get<double>());
  Vector z_true = lgssm_evidence(z1, z2);
  if (z_true.size() != 2 * (spec.horizon + 1))
    throw SchemaError("observations: length does not match the horizon");

  const double q = q_override > 0 ? q_override : member(cfg, "q").get<double>();
  BoxRegion region = BoxRegion::fraction_of(z_true, q);

  LGSSMBeliefs b;
  b.truth = spec;
  if (cfg.contains("prior")) {
    const Json& prior_cfg = cfg.at("prior");
    require_keys(prior_cfg, {}, {"mean_belief_variance", "sample_variances"},
                 "prior");
    if (prior_cfg.contains("mean_belief_variance"))
      b.mean_belief_variance = prior_cfg.at("mean_belief_variance").get<double>();
    if (prior_cfg.contains("sample_variances"))
      b.sample_variances = prior_cfg.at("sample_variances").get<bool>();
  }
  return {std::move(joint), std::move(z_true), std::move(region),
          build_lgssm_prior(std::move(b))};
}

std::vector<std::string> table_header(int dim) {
  std::vector<std::string> h{"attack", "variant", "hyperparams"};
  for (int i = 1; i <= dim; ++i) h.push_back("z_" + std::to_string(i));
  for (const char* c : {"obj_value", "obj_value_wb", "d_kl", "log_ratio",
                        "comp_seconds", "sampling_seconds", "seed"})
    h.emplace_back(c);
  return h;
}

std::vector<std::string> table_row(const EvaluationRow& row) {
  std::vector<std::string> out{row.attack_name, row.variant, row.hyperparams};
  for (int i = 0; i < row.z.size(); ++i)
    out.push_back(format_double(row.z(i)));
  out.push_back(format_double(row.objective_value));
  out.push_back(format_double(row.objective_value_wb));
  out.push_back(format_double(row.kl_to_truth));
  out.push_back(format_double(row.log_ratio));
  out.push_back(format_double(row.comp_seconds));
  out.push_back(format_double(row.sampling_seconds));
  out.push_back(std::to_string(row.seed));
  return out;
}

}  // namespace

AppResult run_application(const std::string& config_path,
                          const std::string& out_dir) {
  const Json cfg = load_json_file(config_path);
  require_keys(cfg, {"app", "seed", "u1", "model"},
               {"true_evidence", "region", "observations", "q", "prior",
                "saa_j", "sga", "rn_draws", "pareto", "paths"},
               "config");
  const std::string app = cfg.at("app").get<std::string>();
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  const double u1 = cfg.at("u1").get<double>();
  const std::string base_dir = fs::path(config_path).parent_path().string();

  AppSetup setup = [&]() {
    if (app == "zhvi-style") return setup_zhvi(cfg, base_dir);
    if (app == "loan-style") return setup_loan(cfg, base_dir);
    if (app == "lgssm") return setup_lgssm(cfg, base_dir);
    throw SchemaError("config: unknown app '" + app + "'");
  }();

  SolveConfig solve_cfg;
  solve_cfg.seed = seed;
  RandomStream root(seed);

  fs::create_directories(out_dir);
  AppResult result;
  std::vector<EvaluationRow>& rows = result.rows;

  // White box.
  const WhiteBoxFamily family =
      make_family(setup.joint, setup.z_true, setup.region, solve_cfg);
  const AttackProblem wb_problem = family.assemble(u1);
  const SolveReport wb_report = solve_white_box(wb_problem, solve_cfg);
  {
    EvaluationRow row = evaluate_attack(setup.joint, setup.z_true,
                                        wb_report.z_star, wb_problem);
    row.attack_name = "wb";
    row.comp_seconds = wb_report.wall_time_seconds;
    row.seed = seed;
    rows.push_back(std::move(row));
  }

  // Grey box: SAA over the configured sample counts.
  std::vector<SolveReport> saa_reports;
  if (cfg.contains("saa_j")) {
    int idx = 0;
    for (const auto& jv : cfg.at("saa_j")) {
      const int j_samples = jv.get<int>();
      std::optional<AttackProblem> gb_problem;
      const SolveReport rep =
          solve_saa(*setup.prior, setup.z_true, u1, setup.region, j_samples,
                    solve_cfg, root.substream(1000 + idx), &gb_problem);
      EvaluationRow row = evaluate_attack(setup.joint, setup.z_true,
                                          rep.z_star, *gb_problem, &wb_problem);
      row.attack_name = "saa";
      row.hyperparams = std::to_string(j_samples);
      row.comp_seconds = rep.wall_time_seconds;
      row.sampling_seconds = rep.sampling_seconds;
      row.seed = seed;
      rows.push_back(std::move(row));
      saa_reports.push_back(rep);
      ++idx;
    }
  }

  // Grey box: SGA variants.
  if (cfg.contains("sga")) {
    int idx = 0;
    for (const auto& sj : cfg.at("sga")) {
      SgaSpec sga = sga_from_json(sj, seed);
      std::optional<AttackProblem> gb_problem;
      const SolveReport rep =
          solve_sga(*setup.prior, setup.z_true, u1, setup.region, sga.cfg,
                    root.substream(2000 + idx), nullptr, &gb_problem);
      EvaluationRow row = evaluate_attack(setup.joint, setup.z_true,
                                          rep.z_star, *gb_problem, &wb_problem);
      row.attack_name = "sga";
      row.variant = to_string(sga.cfg.variant);
      row.hyperparams = sga.hyperparams;
      row.comp_seconds = rep.wall_time_seconds;
      row.sampling_seconds = rep.sampling_seconds;
      row.seed = seed;
      rows.push_back(std::move(row));
      ++idx;
    }
  }

  // Random-noise baseline.
  const int rn_draws = cfg.contains("rn_draws") ? cfg.at("rn_draws").get<int>() : 1;
  for (int i = 0; i < rn_draws; ++i) {
    RandomStream rn_stream = root.substream(3000 + i);
    const Vector z = rn_baseline(setup.z_true, setup.region, rn_stream);
    EvaluationRow row =
        evaluate_attack(setup.joint, setup.z_true, z, wb_problem);
    row.attack_name = "rn";
    row.seed = seed;
    rows.push_back(std::move(row));
  }

  // Uncorrupted truth.
  {
    EvaluationRow row =
        evaluate_attack(setup.joint, setup.z_true, setup.z_true, wb_problem);
    row.attack_name = "truth";
    row.seed = seed;
    rows.push_back(std::move(row));
  }

  const std::string table_path = (fs::path(out_dir) / "table.csv").string();
  std::vector<std::vector<std::string>> csv_rows;
  for (const EvaluationRow& row : rows) csv_rows.push_back(table_row(row));
  write_csv(table_path, table_header(setup.region.dim()), csv_rows);
  result.written_files.push_back(table_path);

  // Optional Pareto sweep over the default grid.
  if (cfg.contains("pareto") && cfg.at("pareto").get<bool>()) {
    const auto points = pareto_sweep(family, default_u1_grid(), solve_cfg);
    std::vector<std::string> header{"u1", "disruption", "risk", "dominated"};
    for (int i = 1; i <= setup.region.dim(); ++i)
      header.push_back("z_" + std::to_string(i));
    std::vector<std::vector<std::string>> prows;
    for (const ParetoPoint& p : points) {
      std::vector<std::string> r{format_double(p.u1),
                                 format_double(p.disruption),
                                 format_double(p.risk),
                                 p.dominated ? "1" : "0"};
      for (int i = 0; i < p.z.size(); ++i) r.push_back(format_double(p.z(i)));
      prows.push_back(std::move(r));
    }
    const std::string pareto_path = (fs::path(out_dir) / "pareto.csv").string();
    write_csv(pareto_path, header, prows);
    result.written_files.push_back(pareto_path);
  }

  // Corrupted observation paths per box fraction (state-space app only).
  if (app == "lgssm" && cfg.contains("paths")) {
    const Json& paths_cfg = cfg.at("paths");
    require_keys(paths_cfg, {"q_list", "u1_list"}, {"saa_j"}, "paths");
    const int path_j = paths_cfg.contains("saa_j")
                           ? paths_cfg.at("saa_j").get<int>()
                           : 1000;
    const int slices = static_cast<int>(setup.z_true.size()) / 2;
    int qi = 0;
    for (const auto& qv : paths_cfg.at("q_list")) {
      const double q = qv.get<double>();
      AppSetup qsetup = setup_lgssm(cfg, base_dir, q);
      const WhiteBoxFamily qfamily =
          make_family(qsetup.joint, qsetup.z_true, qsetup.region, solve_cfg);

      std::vector<std::string> header{"t", "z1_true", "z2_true"};
      std::vector<Vector> columns;
      int ui = 0;
      for (const auto& uv : paths_cfg.at("u1_list")) {
        const double u = uv.get<double>();
        const SolveReport wb = solve_white_box(qfamily.assemble(u), solve_cfg);
        const SolveReport gb =
            solve_saa(*qsetup.prior, qsetup.z_true, u, qsetup.region, path_j,
                      solve_cfg, root.substream(4000 + 100 * qi + ui));
        const std::string tag = format_double(u);
        for (const char* kind : {"wb", "gb"})
          for (const char* sensor : {"z1", "z2"})
            header.push_back(std::string(kind) + "_" + sensor + "_u" + tag);
        columns.push_back(wb.z_star);
        columns.push_back(gb.z_star);
        ++ui;
      }

      std::vector<std::vector<std::string>> prows;
      for (int t = 0; t < slices; ++t) {
        std::vector<std::string> r{std::to_string(t),
                                   format_double(qsetup.z_true(2 * t)),
                                   format_double(qsetup.z_true(2 * t + 1))};
        for (const Vector& zcol : columns) {
          r.push_back(format_double(zcol(2 * t)));
          r.push_back(format_double(zcol(2 * t + 1)));
        }
        prows.push_back(std::move(r));
      }
      const std::string path =
          (fs::path(out_dir) / ("paths_q" + format_double(q) + ".csv"))
              .string();
      write_csv(path, header, prows);
      result.written_files.push_back(path);
      ++qi;
    }
  }

  // Reproducibility bundle.
  Json bundle{{"config", cfg},
              {"app", app},
              {"problem_wb", to_json(wb_problem)},
              {"report_wb", to_json(wb_report)},
              {"convexity", to_json(analyze_convexity(wb_problem))},
              {"rows", Json::array()}};
  for (const EvaluationRow& row : rows) bundle["rows"].push_back(to_json(row));
  for (std::size_t i = 0; i < saa_reports.size(); ++i)
    bundle["saa_reports"].push_back(to_json(saa_reports[i]));
  const std::string bundle_path = (fs::path(out_dir) / "bundle.json").string();
  save_json(bundle, bundle_path);
  result.written_files.push_back(bundle_path);
  return result;
}

}  // namespace mvgd
