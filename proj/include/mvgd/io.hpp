#pragma once

#include <nlohmann/json_fwd.hpp>

#include "mvgd/bench.hpp"
#include "mvgd/convexity.hpp"

namespace mvgd {

using Json = nlohmann::json;

// Strict object parsing: every listed key must be present unless it appears
// in `optional`, and no other keys are tolerated.
void require_keys(const Json& j, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional = {},
                  const std::string& where = "");

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Vector vector_from_json(const Json& j, const std::string& where);
Matrix matrix_from_json(const Json& j, const std::string& where);

// Model file: {"mean", "cov" (row-major), "y_idx", "z_idx"}.
Json to_json(const GaussianJoint& joint);
GaussianJoint joint_from_json(const Json& j);
GaussianJoint load_joint(const std::string& path);
void save_json(const Json& j, const std::string& path);
Json load_json_file(const std::string& path);

// Region file: explicit {"lower","upper"} or {"half_width"} / {"fraction"}
// resolved against a caller-provided center.
BoxRegion region_from_json(const Json& j, const Vector& center);

RegressionSpec regression_spec_from_json(const Json& j);
LGSSMSpec lgssm_spec_from_json(const Json& j);
NIWParams niw_params_from_json(const Json& j, const std::string& where);

// Prior file: {"type": "point-mass"|"niw"|"regression-hierarchy"|"lgssm", ...}.
std::unique_ptr<Prior> prior_from_json(const Json& j);
std::unique_ptr<Prior> load_prior(const std::string& path);

Json to_json(const AttackProblem& problem);
Json to_json(const SolveReport& report);
Json to_json(const ConvexityReport& report);
Json to_json(const EvaluationRow& row);

// Deterministic number formatting shared by every CSV writer.
std::string format_double(double x);
void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace mvgd
