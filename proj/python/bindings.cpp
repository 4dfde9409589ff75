#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mvgd/bench.hpp"
#include "mvgd/io.hpp"

namespace py = pybind11;
using namespace mvgd;

namespace {

Partition make_partition(const std::vector<int>& y_idx,
                         const std::vector<int>& z_idx) {
  return Partition{y_idx, z_idx};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Disruption attacks on conditional inference over multivariate "
            "Gaussians";

  py::register_exception<DegenerateNormalization>(m, "DegenerateNormalization");
  py::register_exception<ValidationError>(m, "ValidationError");
  py::register_exception<SchemaError>(m, "SchemaError");

  py::class_<Partition>(m, "Partition")
      .def(py::init(&make_partition), py::arg("y_idx"), py::arg("z_idx"))
      .def_readonly("y_idx", &Partition::y_idx)
      .def_readonly("z_idx", &Partition::z_idx);

  py::class_<GaussianJoint>(m, "GaussianJoint")
      .def(py::init<Vector, Matrix, Partition>(), py::arg("mean"),
           py::arg("cov"), py::arg("partition"))
      .def_property_readonly("mean", &GaussianJoint::mean)
      .def_property_readonly("cov", &GaussianJoint::cov)
      .def_property_readonly("partition", &GaussianJoint::partition)
      .def_property_readonly("dim", &GaussianJoint::dim);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("ok", &ValidationReport::ok)
      .def_readonly("symmetry_defect", &ValidationReport::symmetry_defect)
      .def_readonly("min_eigenvalue", &ValidationReport::min_eigenvalue)
      .def_readonly("partition_ok", &ValidationReport::partition_ok)
      .def_readonly("reason", &ValidationReport::reason);

  py::class_<ConditionalGaussian>(m, "ConditionalGaussian")
      .def_readonly("mean", &ConditionalGaussian::mean)
      .def_readonly("cov", &ConditionalGaussian::cov);

  py::class_<CanonicalForm>(m, "CanonicalForm")
      .def_readonly("lambda_", &CanonicalForm::lambda)
      .def_readonly("eta", &CanonicalForm::eta)
      .def_readonly("xi", &CanonicalForm::xi);

  m.def("validate_joint", &validate_joint, py::arg("mean"), py::arg("cov"),
        py::arg("partition"));
  m.def("to_canonical",
        py::overload_cast<const GaussianJoint&>(&to_canonical));
  m.def("condition", &condition, py::arg("joint"), py::arg("z"));
  m.def("kl_gaussians",
        py::overload_cast<const Vector&, const Matrix&, const Vector&,
                          const Matrix&>(&kl_gaussians),
        py::arg("mean_p"), py::arg("cov_p"), py::arg("mean_q"),
        py::arg("cov_q"));

  py::class_<BoxRegion>(m, "BoxRegion")
      .def(py::init<Vector, Vector>(), py::arg("lower"), py::arg("upper"))
      .def_static("around", &BoxRegion::around)
      .def_static("fraction_of", &BoxRegion::fraction_of)
      .def_readonly("lower", &BoxRegion::lower)
      .def_readonly("upper", &BoxRegion::upper)
      .def("contains", &BoxRegion::contains, py::arg("z"),
           py::arg("tol") = 1e-12);

  py::class_<DisruptionCoefficients>(m, "DisruptionCoefficients")
      .def_readonly("q", &DisruptionCoefficients::q)
      .def_readonly("v", &DisruptionCoefficients::v)
      .def_readonly("c", &DisruptionCoefficients::c);

  py::class_<DetectionCoefficients>(m, "DetectionCoefficients")
      .def_readonly("a", &DetectionCoefficients::a)
      .def_readonly("b", &DetectionCoefficients::b);

  py::class_<ObjectiveWeights>(m, "ObjectiveWeights")
      .def_readonly("u1", &ObjectiveWeights::u1)
      .def_readonly("u2", &ObjectiveWeights::u2)
      .def_readonly("w1", &ObjectiveWeights::w1)
      .def_readonly("w2", &ObjectiveWeights::w2)
      .def_readonly("phi1_star", &ObjectiveWeights::phi1_star)
      .def_readonly("phi2_star", &ObjectiveWeights::phi2_star);

  py::class_<AttackProblem>(m, "AttackProblem")
      .def_readonly("h", &AttackProblem::h)
      .def_readonly("g", &AttackProblem::g)
      .def_readonly("truth_evidence", &AttackProblem::truth_evidence)
      .def_readonly("weights", &AttackProblem::weights)
      .def("objective", &AttackProblem::objective)
      .def("kl_at", &AttackProblem::kl_at)
      .def("log_ratio_at", &AttackProblem::log_ratio_at);

  m.def("build_disruption", &build_disruption);
  m.def("build_detection", &build_detection);
  m.def("phi1", &phi1);
  m.def("phi2", &phi2);
  m.def("normalize_weights", &normalize_weights, py::arg("u1"),
        py::arg("phi1_star"), py::arg("phi2_star"),
        py::arg("phi1_certified") = true, py::arg("phi2_certified") = true);
  m.def("assemble_wb", &assemble_wb);
  m.def("eval_kl_to_truth", &eval_kl_to_truth);

  py::enum_<Curvature>(m, "Curvature")
      .value("Concave", Curvature::Concave)
      .value("Convex", Curvature::Convex)
      .value("Indefinite", Curvature::Indefinite);

  m.def("classify",
        py::overload_cast<const AttackProblem&>(&classify));
  m.def("weyl_bounds", &weyl_bounds);
  m.def("brute_force_transition", &brute_force_transition, py::arg("dis"),
        py::arg("det"), py::arg("phi1_star"), py::arg("phi2_star"),
        py::arg("step") = 0.005);

  py::class_<RandomStream>(m, "RandomStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
           py::arg("stream_id") = 0)
      .def("substream", &RandomStream::substream)
      .def("normal01", &RandomStream::normal01)
      .def("uniform01", &RandomStream::uniform01);

  py::class_<SolveConfig>(m, "SolveConfig")
      .def(py::init<>())
      .def_readwrite("max_iters", &SolveConfig::max_iters)
      .def_readwrite("grad_tol", &SolveConfig::grad_tol)
      .def_readwrite("starts", &SolveConfig::starts)
      .def_readwrite("vertex_enum_limit", &SolveConfig::vertex_enum_limit)
      .def_readwrite("seed", &SolveConfig::seed);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("z_star", &SolveReport::z_star)
      .def_readonly("objective", &SolveReport::objective)
      .def_readonly("certified", &SolveReport::certified)
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("wall_time_seconds", &SolveReport::wall_time_seconds)
      .def_readonly("kl_to_truth", &SolveReport::kl_to_truth)
      .def_readonly("log_ratio", &SolveReport::log_ratio)
      .def_property_readonly("method", [](const SolveReport& r) {
        return to_string(r.method);
      });

  m.def("project_box", &project_box);
  m.def("solve_white_box", &solve_white_box, py::arg("problem"),
        py::arg("cfg") = SolveConfig{});

  py::class_<Prior, std::shared_ptr<Prior>>(m, "Prior")
      .def("sample", [](const Prior& p, RandomStream& s) { return p.sample(s); })
      .def_property_readonly("name", &Prior::name);

  py::class_<NIWParams>(m, "NIWParams")
      .def(py::init([](Vector mu0, double kappa, Matrix psi, double nu) {
             return NIWParams{std::move(mu0), kappa, std::move(psi), nu};
           }),
           py::arg("mu0"), py::arg("kappa"), py::arg("psi"), py::arg("nu"));

  m.def("point_mass_prior", [](const GaussianJoint& j) {
    return std::shared_ptr<Prior>(new PointMassPrior(j));
  });
  m.def("niw_prior", [](const NIWParams& p, const Partition& part) {
    return std::shared_ptr<Prior>(new NIWPrior(p, part));
  });

  m.def("expected_niw_coefficients", &expected_niw_coefficients);
  m.def(
      "saa_assemble",
      [](const Prior& prior, const Vector& z_true, double u1,
         const BoxRegion& region, int j, RandomStream stream,
         const SolveConfig& cfg) {
        return saa_assemble(prior, z_true, u1, region, j, std::move(stream),
                            cfg);
      },
      py::arg("prior"), py::arg("z_true"), py::arg("u1"), py::arg("region"),
      py::arg("j_samples"), py::arg("stream"), py::arg("cfg") = SolveConfig{});
  m.def(
      "solve_saa",
      [](const Prior& prior, const Vector& z_true, double u1,
         const BoxRegion& region, int j_samples, const SolveConfig& cfg,
         RandomStream stream) {
        return solve_saa(prior, z_true, u1, region, j_samples, cfg,
                         std::move(stream));
      },
      py::arg("prior"), py::arg("z_true"), py::arg("u1"), py::arg("region"),
      py::arg("j_samples"), py::arg("cfg"), py::arg("stream"));

  py::class_<SGAConfig> sga_cfg(m, "SGAConfig");
  py::enum_<SGAConfig::Variant>(sga_cfg, "Variant")
      .value("Basic", SGAConfig::Variant::Basic)
      .value("AdaGrad", SGAConfig::Variant::AdaGrad)
      .value("RMSProp", SGAConfig::Variant::RMSProp)
      .value("Adam", SGAConfig::Variant::Adam);
  sga_cfg.def(py::init<>())
      .def_readwrite("variant", &SGAConfig::variant)
      .def_readwrite("alpha", &SGAConfig::alpha)
      .def_readwrite("eps", &SGAConfig::eps)
      .def_readwrite("tau1", &SGAConfig::tau1)
      .def_readwrite("tau2", &SGAConfig::tau2)
      .def_readwrite("stop_delta", &SGAConfig::stop_delta)
      .def_readwrite("max_iters", &SGAConfig::max_iters)
      .def_readwrite("normalization_samples", &SGAConfig::normalization_samples);

  m.def(
      "solve_sga",
      [](const Prior& prior, const Vector& z_true, double u1,
         const BoxRegion& region, const SGAConfig& cfg, RandomStream stream) {
        return solve_sga(prior, z_true, u1, region, cfg, std::move(stream));
      },
      py::arg("prior"), py::arg("z_true"), py::arg("u1"), py::arg("region"),
      py::arg("cfg"), py::arg("stream"));

  py::class_<RegressionSpec>(m, "RegressionSpec")
      .def(py::init([](double beta0, Vector beta, double sigma2, Vector mu_z,
                       Matrix sigma_zz) {
             return RegressionSpec{beta0, std::move(beta), sigma2,
                                   std::move(mu_z), std::move(sigma_zz)};
           }),
           py::arg("beta0"), py::arg("beta"), py::arg("sigma2"),
           py::arg("mu_z"), py::arg("sigma_zz"));

  py::class_<LGSSMSpec>(m, "LGSSMSpec")
      .def(py::init([](int horizon, double dt, Vector init_means,
                       Vector init_vars, Vector trans_vars, Vector obs_vars) {
             return LGSSMSpec{horizon, dt, std::move(init_means),
                              std::move(init_vars), std::move(trans_vars),
                              std::move(obs_vars)};
           }),
           py::arg("horizon"), py::arg("dt"), py::arg("init_means"),
           py::arg("init_vars"), py::arg("trans_vars"), py::arg("obs_vars"));

  m.def("regression_to_joint", &regression_to_joint);
  m.def("lgssm_unroll", &lgssm_unroll);
  m.def("rn_baseline", &rn_baseline);
  m.def("default_u1_grid", &default_u1_grid);

  m.def("run_application", &run_application, py::arg("config_path"),
        py::arg("out_dir"));
}
