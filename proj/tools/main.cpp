#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>

#include "mvgd/bench.hpp"
#include "mvgd/io.hpp"

namespace {

using mvgd::Json;
using mvgd::Vector;

Vector load_evidence(const std::string& path) {
  return mvgd::vector_from_json(mvgd::load_json_file(path), "true_evidence");
}

mvgd::BoxRegion load_region(const std::string& path, const Vector& center) {
  return mvgd::region_from_json(mvgd::load_json_file(path), center);
}

void emit(const Json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    mvgd::save_json(j, out_path);
  }
}

void emit_csv(const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows,
              const std::string& out_path) {
  if (!out_path.empty()) {
    mvgd::write_csv(out_path, header, rows);
    return;
  }
  auto print_line = [](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      std::cout << cells[i] << (i + 1 < cells.size() ? "," : "\n");
  };
  print_line(header);
  for (const auto& row : rows) print_line(row);
}

std::vector<int> parse_index_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

struct AttackArgs {
  std::string model_path;
  std::string prior_path;
  std::string evidence_path;
  std::string region_path;
  double u1 = 0.5;
  std::uint64_t seed = 0;
  std::string out;
  bool certify = false;
};

void add_common(CLI::App* cmd, AttackArgs& a, bool wants_model) {
  if (wants_model)
    cmd->add_option("--model", a.model_path, "model JSON file")->required();
  else
    cmd->add_option("--prior", a.prior_path, "prior JSON file")->required();
  cmd->add_option("--true-evidence", a.evidence_path,
                  "JSON array of true evidence values")->required();
  cmd->add_option("--region", a.region_path, "feasible region JSON file")
      ->required();
  cmd->add_option("--u1", a.u1, "disruption weight in (0,1)");
  cmd->add_option("--seed", a.seed, "RNG seed");
  cmd->add_option("--out", a.out, "output path (stdout when omitted)");
}

Json finish_report(const mvgd::SolveReport& rep, bool certify) {
  if (certify && !rep.certified)
    throw mvgd::ValidationError(
        "certified solution requested but only a heuristic one is available");
  return mvgd::to_json(rep);
}

std::string error_name(const std::exception& e) {
  if (dynamic_cast<const mvgd::DegenerateNormalization*>(&e))
    return "degenerate_normalization";
  if (dynamic_cast<const mvgd::SchemaError*>(&e)) return "schema";
  if (dynamic_cast<const mvgd::IoError*>(&e)) return "io";
  if (dynamic_cast<const mvgd::DimensionError*>(&e)) return "dimension";
  if (dynamic_cast<const mvgd::ValidationError*>(&e)) return "validation";
  if (dynamic_cast<const mvgd::SingularMatrixError*>(&e)) return "singular";
  if (dynamic_cast<const mvgd::RetryLimitError*>(&e)) return "retry_limit";
  return "internal";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"white/grey-box disruption attacks on Gaussian conditional inference"};
  app.require_subcommand(1);

  // ---- attack ----
  auto* attack = app.add_subcommand("attack", "solve an attack problem");
  attack->require_subcommand(1);

  AttackArgs wb_args;
  auto* wb = attack->add_subcommand("wb", "white-box attack");
  add_common(wb, wb_args, true);
  wb->add_flag("--certify", wb_args.certify,
               "fail unless the result is certified optimal");

  AttackArgs saa_args;
  int saa_j = 1000;
  auto* saa = attack->add_subcommand("gb-saa", "grey-box attack via SAA");
  add_common(saa, saa_args, false);
  saa->add_option("--j", saa_j, "number of prior samples")->required();

  AttackArgs sga_args;
  mvgd::SGAConfig sga_cfg;
  std::string sga_variant = "adam";
  auto* sga = attack->add_subcommand("gb-sga", "grey-box attack via SGA");
  add_common(sga, sga_args, false);
  sga->add_option("--variant", sga_variant, "basic|adagrad|rmsprop|adam");
  sga->add_option("--alpha", sga_cfg.alpha, "learning rate");
  sga->add_option("--eps", sga_cfg.eps, "denominator offset");
  sga->add_option("--tau1", sga_cfg.tau1, "squared-gradient decay");
  sga->add_option("--tau2", sga_cfg.tau2, "momentum decay (adam)");
  sga->add_option("--stop-delta", sga_cfg.stop_delta, "stopping distance");
  sga->add_option("--max-iters", sga_cfg.max_iters, "iteration cap");
  sga->add_option("--norm-samples", sga_cfg.normalization_samples,
                  "samples used to normalize the weights");

  // ---- analyze ----
  auto* analyze = app.add_subcommand("analyze", "spectra and convexity");
  analyze->require_subcommand(1);

  AttackArgs conv_args;
  bool conv_brute = false;
  double conv_step = 0.005;
  auto* conv = analyze->add_subcommand("convexity", "classify the objective");
  add_common(conv, conv_args, true);
  conv->add_flag("--brute-force", conv_brute, "grid-search the transitions");
  conv->add_option("--step", conv_step, "grid step for the search");

  std::string oc_sampler = "ggt";
  int oc_n = 6, oc_nz = 3, oc_trials = 100;
  double oc_phi1 = 1.0, oc_phi2 = 1.0, oc_step = 0.005;
  std::uint64_t oc_seed = 0;
  std::string oc_out;
  auto* oc = analyze->add_subcommand("overcoverage",
                                     "bound conservativeness study");
  oc->add_option("--sampler", oc_sampler, "ggt|iw");
  oc->add_option("--n", oc_n, "joint dimension");
  oc->add_option("--nz", oc_nz, "evidence dimension");
  oc->add_option("--phi1", oc_phi1, "|phi1*| used in the weights");
  oc->add_option("--phi2", oc_phi2, "|phi2*| used in the weights");
  oc->add_option("--trials", oc_trials, "number of sampled instances");
  oc->add_option("--step", oc_step, "grid step");
  oc->add_option("--seed", oc_seed, "RNG seed");
  oc->add_option("--out", oc_out, "CSV output path (stdout when omitted)");

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "multi-objective sweeps");
  sweep->require_subcommand(1);
  AttackArgs par_args;
  std::string par_grid;
  auto* par = sweep->add_subcommand("pareto", "trace the disruption/risk front");
  add_common(par, par_args, true);
  par->add_option("--grid", par_grid,
                  "comma-separated u1 values (default: the 21-point grid)");

  // ---- build-model ----
  auto* build = app.add_subcommand("build-model", "construct a model file");
  build->require_subcommand(1);

  std::string mle_data, mle_y, mle_z, mle_out;
  auto* mle = build->add_subcommand("mle", "fit an MVG to CSV data");
  mle->add_option("--data", mle_data, "CSV file (header row)")->required();
  mle->add_option("--y-idx", mle_y, "latent column indices, e.g. 0,1")
      ->required();
  mle->add_option("--z-idx", mle_z, "evidence column indices")->required();
  mle->add_option("--out", mle_out, "output model JSON");

  std::string reg_spec, reg_out;
  auto* reg = build->add_subcommand("regression", "joint from a regression");
  reg->add_option("--spec", reg_spec, "regression spec JSON")->required();
  reg->add_option("--out", reg_out, "output model JSON");

  std::string ss_spec, ss_out;
  auto* ss = build->add_subcommand("lgssm", "unroll a state-space model");
  ss->add_option("--spec", ss_spec, "LG-SSM spec JSON")->required();
  ss->add_option("--out", ss_out, "output model JSON");

  // ---- baseline ----
  auto* baseline = app.add_subcommand("baseline", "reference attacks");
  baseline->require_subcommand(1);
  std::string rn_evidence, rn_region, rn_out;
  std::uint64_t rn_seed = 0;
  auto* rn = baseline->add_subcommand("rn", "uniform random noise in the box");
  rn->add_option("--true-evidence", rn_evidence)->required();
  rn->add_option("--region", rn_region)->required();
  rn->add_option("--seed", rn_seed, "RNG seed");
  rn->add_option("--out", rn_out, "output path (stdout when omitted)");

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "application pipelines");
  bench->require_subcommand(1);
  std::string bench_config, bench_out_dir = "out";
  auto* bench_run = bench->add_subcommand("run", "run a bundled application");
  bench_run->add_option("--config", bench_config, "application config JSON")
      ->required();
  bench_run->add_option("--out-dir", bench_out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (wb->parsed()) {
      const mvgd::GaussianJoint joint = mvgd::load_joint(wb_args.model_path);
      const Vector z_true = load_evidence(wb_args.evidence_path);
      const mvgd::BoxRegion region = load_region(wb_args.region_path, z_true);
      mvgd::SolveConfig cfg;
      cfg.seed = wb_args.seed;
      const auto family = mvgd::make_family(joint, z_true, region, cfg);
      const auto problem = family.assemble(wb_args.u1);
      const auto rep = mvgd::solve_white_box(problem, cfg);
      Json out = finish_report(rep, wb_args.certify);
      out["problem"] = mvgd::to_json(problem);
      out["seed"] = wb_args.seed;
      emit(out, wb_args.out);
    } else if (saa->parsed()) {
      const auto prior = mvgd::load_prior(saa_args.prior_path);
      const Vector z_true = load_evidence(saa_args.evidence_path);
      const mvgd::BoxRegion region = load_region(saa_args.region_path, z_true);
      mvgd::SolveConfig cfg;
      cfg.seed = saa_args.seed;
      const auto rep =
          mvgd::solve_saa(*prior, z_true, saa_args.u1, region, saa_j, cfg,
                          mvgd::RandomStream(saa_args.seed));
      Json out = mvgd::to_json(rep);
      out["seed"] = saa_args.seed;
      emit(out, saa_args.out);
    } else if (sga->parsed()) {
      const auto prior = mvgd::load_prior(sga_args.prior_path);
      const Vector z_true = load_evidence(sga_args.evidence_path);
      const mvgd::BoxRegion region = load_region(sga_args.region_path, z_true);
      if (sga_variant == "basic") sga_cfg.variant = mvgd::SGAConfig::Variant::Basic;
      else if (sga_variant == "adagrad") sga_cfg.variant = mvgd::SGAConfig::Variant::AdaGrad;
      else if (sga_variant == "rmsprop") sga_cfg.variant = mvgd::SGAConfig::Variant::RMSProp;
      else if (sga_variant == "adam") sga_cfg.variant = mvgd::SGAConfig::Variant::Adam;
      else throw mvgd::SchemaError("unknown SGA variant '" + sga_variant + "'");
      sga_cfg.seed = sga_args.seed;
      const auto rep =
          mvgd::solve_sga(*prior, z_true, sga_args.u1, region, sga_cfg,
                          mvgd::RandomStream(sga_args.seed));
      Json out = mvgd::to_json(rep);
      out["seed"] = sga_args.seed;
      emit(out, sga_args.out);
    } else if (conv->parsed()) {
      const mvgd::GaussianJoint joint = mvgd::load_joint(conv_args.model_path);
      const Vector z_true = load_evidence(conv_args.evidence_path);
      const mvgd::BoxRegion region = load_region(conv_args.region_path, z_true);
      mvgd::SolveConfig cfg;
      cfg.seed = conv_args.seed;
      const auto family = mvgd::make_family(joint, z_true, region, cfg);
      const auto problem = family.assemble(conv_args.u1);
      emit(mvgd::to_json(mvgd::analyze_convexity(problem, conv_brute,
                                                 conv_step)),
           conv_args.out);
    } else if (oc->parsed()) {
      mvgd::CovSampler sampler;
      if (oc_sampler == "ggt") sampler = mvgd::CovSampler::GGT;
      else if (oc_sampler == "iw") sampler = mvgd::CovSampler::InverseWishart;
      else throw mvgd::SchemaError("unknown sampler '" + oc_sampler + "'");
      const auto sum = mvgd::overcoverage_study(
          sampler, oc_n, oc_nz, oc_phi1, oc_phi2, oc_trials,
          mvgd::RandomStream(oc_seed), oc_step);
      emit_csv({"sampler", "n", "nz", "phi1_star", "phi2_star", "median",
                "q25", "q75"},
               {{oc_sampler, std::to_string(sum.n), std::to_string(sum.nz),
                 mvgd::format_double(sum.phi1_star),
                 mvgd::format_double(sum.phi2_star),
                 mvgd::format_double(sum.median),
                 mvgd::format_double(sum.q25),
                 mvgd::format_double(sum.q75)}},
               oc_out);
    } else if (par->parsed()) {
      const mvgd::GaussianJoint joint = mvgd::load_joint(par_args.model_path);
      const Vector z_true = load_evidence(par_args.evidence_path);
      const mvgd::BoxRegion region = load_region(par_args.region_path, z_true);
      mvgd::SolveConfig cfg;
      cfg.seed = par_args.seed;
      std::vector<double> grid;
      if (par_grid.empty()) {
        grid = mvgd::default_u1_grid();
      } else {
        std::stringstream ss_grid(par_grid);
        std::string tok;
        while (std::getline(ss_grid, tok, ',')) grid.push_back(std::stod(tok));
      }
      const auto family = mvgd::make_family(joint, z_true, region, cfg);
      const auto points = mvgd::pareto_sweep(family, grid, cfg);
      std::vector<std::string> header{"u1", "disruption", "risk", "dominated"};
      for (int i = 1; i <= region.dim(); ++i)
        header.push_back("z_" + std::to_string(i));
      std::vector<std::vector<std::string>> rows;
      for (const auto& p : points) {
        std::vector<std::string> r{mvgd::format_double(p.u1),
                                   mvgd::format_double(p.disruption),
                                   mvgd::format_double(p.risk),
                                   p.dominated ? "1" : "0"};
        for (int i = 0; i < p.z.size(); ++i)
          r.push_back(mvgd::format_double(p.z(i)));
        rows.push_back(std::move(r));
      }
      emit_csv(header, rows, par_args.out);
    } else if (mle->parsed()) {
      const auto data = mvgd::load_csv(mle_data);
      mvgd::Partition part{parse_index_list(mle_y), parse_index_list(mle_z)};
      emit(mvgd::to_json(mvgd::fit_mle(data, part)), mle_out);
    } else if (reg->parsed()) {
      const auto spec =
          mvgd::regression_spec_from_json(mvgd::load_json_file(reg_spec));
      emit(mvgd::to_json(mvgd::regression_to_joint(spec)), reg_out);
    } else if (ss->parsed()) {
      const auto spec = mvgd::lgssm_spec_from_json(mvgd::load_json_file(ss_spec));
      emit(mvgd::to_json(mvgd::lgssm_unroll(spec)), ss_out);
    } else if (rn->parsed()) {
      const Vector z_true = load_evidence(rn_evidence);
      const mvgd::BoxRegion region = load_region(rn_region, z_true);
      mvgd::RandomStream stream(rn_seed);
      const Vector z = mvgd::rn_baseline(z_true, region, stream);
      emit(Json{{"z", mvgd::to_json(z)}, {"seed", rn_seed}}, rn_out);
    } else if (bench_run->parsed()) {
      const auto result = mvgd::run_application(bench_config, bench_out_dir);
      Json out{{"rows", result.rows.size()},
               {"written_files", result.written_files}};
      emit(out, "");
    }
  } catch (const std::exception& e) {
    Json err{{"error", {{"type", error_name(e)}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
