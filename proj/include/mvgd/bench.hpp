#pragma once

#include <cstdint>

#include "mvgd/models.hpp"

namespace mvgd {

/// One benchmark table row (Table-1 layout). Objective values are carried
/// under both the attack's own problem and the white-box problem so that
/// grey- and white-box rows stay comparable; KL and log-ratio are always
/// computed against the truth model.
struct EvaluationRow {
  std::string attack_name;
  std::string variant;
  std::string hyperparams;
  Vector z;
  double objective_value = 0.0;
  double objective_value_wb = 0.0;
  double kl_to_truth = 0.0;
  double log_ratio = 0.0;       // <= 0; plausibility under the truth model
  Vector modal_estimate;        // conditional mean of Y given z
  double comp_seconds = 0.0;
  double sampling_seconds = 0.0;
  std::uint64_t seed = 0;
};

struct ParetoPoint {
  double u1 = 0.5;
  Vector z;
  double disruption = 0.0;  // D_KL against the family's joint
  double risk = 0.0;        // negative log-ratio, >= 0
  bool dominated = false;
};

/// Re-usable white-box ingredients: coefficients plus the single-objective
/// optima, so sweeps can re-normalize weights per u1 without refitting.
struct WhiteBoxFamily {
  DisruptionCoefficients dis;
  DetectionCoefficients det;
  OptimumValue phi1_star;
  OptimumValue phi2_star;
  BoxRegion region;
  Vector z_true;

  AttackProblem assemble(double u1) const;
};

WhiteBoxFamily make_family(const GaussianJoint& joint, const Vector& z_true,
                           const BoxRegion& region, const SolveConfig& cfg);

/// Uniform noise over the full feasible box around the truth.
Vector rn_baseline(const Vector& z_true, const BoxRegion& region,
                   RandomStream& stream);

/// The 21-point u1 grid {0.01, 0.05, 0.1, ..., 0.95, 0.99}.
std::vector<double> default_u1_grid();

std::vector<ParetoPoint> pareto_sweep(const WhiteBoxFamily& family,
                                      const std::vector<double>& u1_grid,
                                      const SolveConfig& cfg);

EvaluationRow evaluate_attack(const GaussianJoint& j_truth,
                              const Vector& z_true, const Vector& z,
                              const AttackProblem& problem,
                              const AttackProblem* wb_problem = nullptr);

struct AppResult {
  std::vector<EvaluationRow> rows;
  std::vector<std::string> written_files;
};

/// Full pipeline for one bundled application config: build the model,
/// solve WB / SAA / SGA / RN, evaluate every attack against the truth
/// model, and write the Table-1-shaped CSV plus a JSON bundle (and the
/// corrupted-path CSVs for the state-space application).
AppResult run_application(const std::string& config_path,
                          const std::string& out_dir);

}  // namespace mvgd
