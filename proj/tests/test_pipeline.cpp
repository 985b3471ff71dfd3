#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "migplan/pipeline.hpp"

using namespace migplan;

namespace {

std::string slurp(const std::string& file) {
  std::ifstream in(file);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("pipeline produces validated plans on a toy scenario") {
  auto sc = make_trapezoid_scenario(3, {}, 0.05, 1, 1);
  pipeline_config cfg;
  auto pr = run_pipeline(sc, cfg);
  CHECK(pr.feasible);
  REQUIRE(pr.plan.destinations.size() == sc.agents.size());
  REQUIRE(pr.tau.size() == sc.agents.size());
  for (std::size_t f = 0; f < pr.tau.size(); ++f) {
    CHECK(pr.tau[f] > 0.0);
    CHECK(pr.zeta[f] == doctest::Approx(1.0 / pr.tau[f]));
  }
  // the reported migration times under the folded state sizes match tau
  for (std::size_t f = 0; f < pr.tau.size(); ++f)
    CHECK(pr.report.migration_times[f] == doctest::Approx(pr.tau[f]));
}

TEST_CASE("pipeline total cost dominates the joint oracle") {
  int compared = 0;
  for (std::uint64_t seed = 1; compared < 8 && seed <= 40; ++seed) {
    scenario sc;
    try {
      sc = make_small_scenario(5, 8, 2, seed);
    } catch (const error&) {
      continue;
    }
    pipeline_config cfg;
    pipeline_result pr;
    try {
      pr = run_pipeline(sc, cfg);
    } catch (const error&) {
      continue;
    }
    auto oracle = exhaustive_joint_oracle(sc, cfg, 0.1);
    ++compared;
    CHECK(pr.report.total_cost >= oracle.best_total - 1e-9);
  }
  CHECK(compared >= 4);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
  namespace fs = std::filesystem;
  auto run = [](const std::string& dir) {
    experiment_config cfg;
    cfg.preset = "fig1";
    cfg.num_seeds = 3;
    cfg.out_dir = dir;
    cfg.dump_plans = true;
    run_experiment(cfg);
  };
  auto a = fs::temp_directory_path() / "migplan_det_a";
  auto b = fs::temp_directory_path() / "migplan_det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  run(a.string());
  run(b.string());
  CHECK(slurp((a / "rows.csv").string()) == slurp((b / "rows.csv").string()));
  CHECK(slurp((a / "summary.csv").string()) ==
        slurp((b / "summary.csv").string()));
  for (const auto& entry : fs::directory_iterator(a / "plans")) {
    auto other = b / "plans" / entry.path().filename();
    CHECK(fs::exists(other));
    CHECK(slurp(entry.path().string()) == slurp(other.string()));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("fig1 preset emits one row per seed and algorithm") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "migplan_fig1_rows";
  fs::remove_all(dir);
  experiment_config cfg;
  cfg.preset = "fig1";
  cfg.num_seeds = 30;
  cfg.out_dir = dir.string();
  cfg.dump_plans = false;
  run_experiment(cfg);
  auto rows = slurp((dir / "rows.csv").string());
  int lines = 0;
  for (char c : rows)
    if (c == '\n') ++lines;
  CHECK(lines == 121);  // header + 30 seeds x 4 algorithms
  fs::remove_all(dir);
}

TEST_CASE("scenario files round trip through disk") {
  namespace fs = std::filesystem;
  auto file = fs::temp_directory_path() / "migplan_sc.json";
  auto sc = make_grid_scenario(4, 4, 0.5, 0.25, 13);
  save_scenario(sc, file.string());
  auto back = load_scenario(file.string());
  CHECK(scenario_to_json(back) == scenario_to_json(sc));
  fs::remove(file.string());
}

TEST_CASE("unknown preset and algorithm are rejected") {
  experiment_config cfg;
  cfg.preset = "fig9";
  cfg.out_dir =
      (std::filesystem::temp_directory_path() / "migplan_bad_preset").string();
  CHECK_THROWS_AS(run_experiment(cfg), invalid_parameter);
  std::filesystem::remove_all(cfg.out_dir);

  auto sc = make_trapezoid_scenario(3, {}, 0.05, 1, 1);
  pipeline_config pc;
  pc.leader_algo = "simulated-annealing";
  CHECK_THROWS_AS(run_pipeline(sc, pc), invalid_parameter);
}
