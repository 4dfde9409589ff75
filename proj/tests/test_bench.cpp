#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "mvgd/bench.hpp"
#include "mvgd/io.hpp"
#include "test_helpers.hpp"

using namespace mvgd;
using mvgd::testing::leading_partition;
using mvgd::testing::random_joint;
using mvgd::testing::random_vector;

namespace fs = std::filesystem;

namespace {

struct Fixture {
  GaussianJoint joint;
  Vector z_true;
  BoxRegion region;
};

Fixture small_fixture(std::uint64_t seed = 401) {
  RandomStream stream(seed);
  GaussianJoint joint = random_joint(5, 2, stream);
  Vector z_true = marginal_z(joint).mean + 0.3 * random_vector(3, stream);
  BoxRegion region = BoxRegion::around(z_true, 0.4);
  return {std::move(joint), std::move(z_true), std::move(region)};
}

std::vector<std::vector<std::string>> csv_without_timing(
    const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::vector<int> drop;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (rows.empty()) {
      for (int i = 0; i < static_cast<int>(cells.size()); ++i)
        if (cells[i] == "comp_seconds" || cells[i] == "sampling_seconds")
          drop.push_back(i);
    }
    for (auto it = drop.rbegin(); it != drop.rend(); ++it)
      cells.erase(cells.begin() + *it);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("rn baseline stays feasible and replays under a seed") {
  const Fixture fx = small_fixture();
  RandomStream a(5), b(5);
  const Vector z1 = rn_baseline(fx.z_true, fx.region, a);
  const Vector z2 = rn_baseline(fx.z_true, fx.region, b);
  CHECK((z1 - z2).norm() == 0.0);

  RandomStream stream(6);
  for (int i = 0; i < 200; ++i)
    CHECK(fx.region.contains(rn_baseline(fx.z_true, fx.region, stream)));

  const BoxRegion degenerate(fx.z_true, fx.z_true);
  CHECK((rn_baseline(fx.z_true, degenerate, stream) - fx.z_true).norm() ==
        0.0);
}

TEST_CASE("the default u1 grid is the 21-point ladder") {
  const auto grid = default_u1_grid();
  REQUIRE(grid.size() == 21);
  CHECK(grid.front() == doctest::Approx(0.01));
  CHECK(grid[1] == doctest::Approx(0.05));
  CHECK(grid[10] == doctest::Approx(0.5));
  CHECK(grid[19] == doctest::Approx(0.95));
  CHECK(grid.back() == doctest::Approx(0.99));
}

TEST_CASE("pareto sweep: dominance filter and risk endpoints") {
  const Fixture fx = small_fixture();
  SolveConfig cfg;
  const WhiteBoxFamily family =
      make_family(fx.joint, fx.z_true, fx.region, cfg);
  const auto points = pareto_sweep(family, default_u1_grid(), cfg);
  REQUIRE(points.size() == 21);

  std::vector<const ParetoPoint*> retained;
  for (const auto& p : points)
    if (!p.dominated) retained.push_back(&p);
  REQUIRE(!retained.empty());

  // No retained point dominated by another retained point.
  for (const auto* a : retained)
    for (const auto* b : retained) {
      if (a == b) continue;
      const bool dominates = b->disruption >= a->disruption &&
                             b->risk <= a->risk &&
                             (b->disruption > a->disruption ||
                              b->risk < a->risk);
      CHECK_FALSE(dominates);
    }

  // Sorted by risk, the front's disruption is nondecreasing.
  std::vector<const ParetoPoint*> by_risk = retained;
  std::sort(by_risk.begin(), by_risk.end(),
            [](auto* a, auto* b) { return a->risk < b->risk; });
  for (std::size_t i = 1; i < by_risk.size(); ++i)
    CHECK(by_risk[i]->disruption >= by_risk[i - 1]->disruption - 1e-9);

  // The most risk-averse grid point attains the smallest risk of the sweep.
  const double min_risk =
      std::min_element(points.begin(), points.end(), [](auto& a, auto& b) {
        return a.risk < b.risk;
      })->risk;
  CHECK(points.front().u1 == doctest::Approx(0.01));
  CHECK(points.front().risk <= min_risk + 1e-9);

  CHECK_THROWS_AS(pareto_sweep(family, {0.0}, cfg), ValidationError);
}

TEST_CASE("evaluate_attack fills a self-consistent row") {
  const Fixture fx = small_fixture();
  SolveConfig cfg;
  const WhiteBoxFamily family =
      make_family(fx.joint, fx.z_true, fx.region, cfg);
  const AttackProblem problem = family.assemble(0.5);
  const SolveReport rep = solve_white_box(problem, cfg);

  const EvaluationRow row =
      evaluate_attack(fx.joint, fx.z_true, rep.z_star, problem);
  CHECK(row.objective_value ==
        doctest::Approx(problem.objective(row.z)).epsilon(1e-9));
  CHECK(row.kl_to_truth ==
        doctest::Approx(eval_kl_to_truth(fx.joint, fx.z_true, row.z))
            .epsilon(1e-9));
  CHECK(row.kl_to_truth >= 0.0);
  CHECK(row.log_ratio <= 1e-12);
  CHECK((row.modal_estimate - condition(fx.joint, row.z).mean).norm() <=
        1e-12);

  const EvaluationRow truth_row =
      evaluate_attack(fx.joint, fx.z_true, fx.z_true, problem);
  CHECK(truth_row.kl_to_truth == doctest::Approx(0.0).epsilon(1e-10));

  Vector outside = fx.region.upper;
  outside(0) += 1.0;
  CHECK_THROWS_AS(evaluate_attack(fx.joint, fx.z_true, outside, problem),
                  ValidationError);
}

TEST_CASE("certified white-box solutions dominate random noise") {
  // Concave instance so the white-box optimum is certified global.
  Matrix cov(4, 4);
  cov << 1.0, 0.2, 0.1, 0.05, 0.2, 1.0, 0.15, 0.1, 0.1, 0.15, 1.0, 0.2, 0.05,
      0.1, 0.2, 1.0;
  const GaussianJoint joint(Vector::Ones(4), cov, leading_partition(2, 4));
  Vector z_true(2);
  z_true << 1.2, 0.8;
  const BoxRegion region = BoxRegion::around(z_true, 0.25);
  SolveConfig cfg;
  const WhiteBoxFamily family = make_family(joint, z_true, region, cfg);
  const AttackProblem problem = family.assemble(0.05);
  REQUIRE(classify(problem) == Curvature::Concave);
  const SolveReport rep = solve_white_box(problem, cfg);
  REQUIRE(rep.certified);

  RandomStream stream(7);
  for (int i = 0; i < 1000; ++i) {
    const Vector z = rn_baseline(z_true, region, stream);
    CHECK(rep.objective >= problem.objective(z) - 1e-9);
  }
}

TEST_CASE("modal estimates shift under the attack") {
  const Fixture fx = small_fixture();
  SolveConfig cfg;
  const WhiteBoxFamily family =
      make_family(fx.joint, fx.z_true, fx.region, cfg);
  const AttackProblem problem = family.assemble(0.5);
  const SolveReport rep = solve_white_box(problem, cfg);

  const Vector before = condition(fx.joint, fx.z_true).mean;
  const Vector after = condition(fx.joint, rep.z_star).mean;
  // A positive-KL attack must move the conditional mean (covariance fixed).
  REQUIRE(*rep.kl_to_truth > 1e-6);
  CHECK((after - before).norm() > 1e-6);
}

TEST_CASE("run_application produces a reproducible table") {
  const Json cfg{
      {"app", "zhvi-style"},
      {"seed", 11},
      {"u1", 0.5},
      {"model",
       {{"data", std::string(MVGD_DATA_DIR) + "/zhvi_synthetic.csv"},
        {"y_idx", {0, 1, 2, 3}},
        {"z_idx", {4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14}}}},
      {"true_evidence",
       {1.459, 1.214, 1.344, 1.377, 0.941, 1.531, 0.838, 0.766, 0.679, 0.856,
        0.537}},
      {"region", {{"half_width", 0.15}}},
      {"prior", {{"kappa", 5}, {"nu", 17}}},
      {"saa_j", {25, 50}},
      {"sga",
       Json::array({{{"variant", "adam"},
                     {"alpha", 0.005},
                     {"eps", 1e-8},
                     {"max_iters", 300},
                     {"normalization_samples", 100}}})},
  };

  const fs::path dir = fs::temp_directory_path() / "mvgd_bench_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cfg_path = (dir / "config.json").string();
  save_json(cfg, cfg_path);

  const AppResult first =
      run_application(cfg_path, (dir / "out1").string());
  REQUIRE(first.rows.size() == 6);  // wb, 2 saa, 1 sga, rn, truth
  CHECK(first.rows.front().attack_name == "wb");
  CHECK(first.rows.back().attack_name == "truth");
  CHECK(first.rows.back().kl_to_truth == doctest::Approx(0.0).epsilon(1e-9));
  for (const auto& row : first.rows) {
    CHECK(row.kl_to_truth >= 0.0);
    CHECK(row.log_ratio <= 1e-12);
  }

  const AppResult second =
      run_application(cfg_path, (dir / "out2").string());
  CHECK(csv_without_timing((dir / "out1" / "table.csv").string()) ==
        csv_without_timing((dir / "out2" / "table.csv").string()));

  // The bundle mirrors the rows.
  const Json bundle = load_json_file((dir / "out1" / "bundle.json").string());
  CHECK(bundle.at("rows").size() == first.rows.size());
  CHECK(bundle.contains("problem_wb"));
  fs::remove_all(dir);
}

TEST_CASE("run_application rejects malformed configs") {
  const fs::path dir = fs::temp_directory_path() / "mvgd_bench_bad";
  fs::create_directories(dir);
  const std::string cfg_path = (dir / "bad.json").string();
  save_json(Json{{"app", "zhvi-style"}, {"seed", 1}}, cfg_path);
  CHECK_THROWS_AS(run_application(cfg_path, (dir / "out").string()),
                  SchemaError);
  save_json(Json{{"app", "nope"},
                 {"seed", 1},
                 {"u1", 0.5},
                 {"model", Json::object()}},
            cfg_path);
  CHECK_THROWS_AS(run_application(cfg_path, (dir / "out").string()),
                  SchemaError);
  fs::remove_all(dir);
}
