// Command-line front end: scenario generation, single plan runs, experiment
// sweeps, plan validation, and the small-case oracles.
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "migplan/pipeline.hpp"

using namespace migplan;

namespace {

scenario build_preset(const std::string& topology, std::uint64_t seed,
                      double fraction, int levels, int rows, int cols,
                      double link_prob, int pods, int num_nodes, int num_links,
                      int num_agents) {
  if (topology == "trapezoid")
    return make_trapezoid_scenario(levels, {}, fraction, seed);
  if (topology == "grid")
    return make_grid_scenario(rows, cols, link_prob, fraction, seed);
  if (topology == "three_tier")
    return make_three_tier_scenario(pods, fraction, seed);
  if (topology == "small")
    return make_small_scenario(num_nodes, num_links, num_agents, seed);
  throw invalid_parameter("unknown topology: " + topology);
}

void print_result(const pipeline_result& pr) {
  nlohmann::json j;
  j["destinations"] = pr.plan.destinations;
  j["utility"] = {{"u_n", pr.leader.u_n},
                  {"u_l", pr.leader.u_l},
                  {"u_p", pr.leader.u_p},
                  {"total", pr.leader.total}};
  j["cost"] = {{"forwarding", pr.report.forwarding_cost},
               {"congestion", pr.report.congestion_cost},
               {"total", pr.report.total_cost}};
  j["migration_times"] = pr.report.migration_times;
  j["tau"] = pr.tau;
  j["zeta"] = pr.zeta;
  j["feasible"] = pr.feasible;
  std::cout << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VNF failure-mitigation planner"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string topology = "trapezoid";
  double fraction = 0.1;
  int levels = 3, rows = 5, cols = 5, pods = 2;
  double link_prob = 0.5;
  int num_nodes = 6, num_links = 10, num_agents = 2;
  std::string out_file, in_file, plan_file;
  std::string algorithm = "viterbi";
  bool strict_tat = false;
  double r_fold = 0.1;

  auto add_topology_opts = [&](CLI::App* cmd) {
    cmd->add_option("--topology", topology,
                    "trapezoid|grid|three_tier|small");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--fraction", fraction, "failure fraction");
    cmd->add_option("--levels", levels, "trapezoid levels");
    cmd->add_option("--rows", rows, "grid rows");
    cmd->add_option("--cols", cols, "grid cols");
    cmd->add_option("--link-prob", link_prob, "grid link probability");
    cmd->add_option("--pods", pods, "three-tier pods");
    cmd->add_option("--nodes", num_nodes, "small-topology node count");
    cmd->add_option("--links", num_links, "small-topology link count");
    cmd->add_option("--agents", num_agents, "small-topology agent cap");
  };

  auto* gen = app.add_subcommand("gen", "generate a scenario file");
  add_topology_opts(gen);
  gen->add_option("--out", out_file, "output scenario json")->required();

  auto* plan = app.add_subcommand("plan", "plan migrations for a scenario");
  add_topology_opts(plan);
  plan->add_option("--in", in_file, "scenario json (overrides --topology)");
  plan->add_option("--algorithm", algorithm,
                   "viterbi|exhaustive|greedy|random");
  plan->add_flag("--strict-tat", strict_tat, "enforce the deadline check");
  plan->add_option("--r-fold", r_fold, "retransfer folding ratio");
  plan->add_option("--dump-plan", plan_file, "write the plan json here");

  experiment_config exp_cfg;
  auto* sweep = app.add_subcommand("sweep", "run an experiment preset");
  sweep->add_option("--preset", exp_cfg.preset, "fig1|fig2|fig3|fig4|fig5")
      ->required();
  sweep->add_option("--seeds", exp_cfg.num_seeds, "number of seeds");
  sweep->add_option("--seed0", exp_cfg.seed0, "first seed");
  sweep->add_option("--out", exp_cfg.out_dir, "output directory");
  sweep->add_flag("--strict-tat", exp_cfg.strict_tat);
  sweep->add_option("--r-fold", exp_cfg.r_fold);
  sweep->add_flag("!--no-plans", exp_cfg.dump_plans, "skip plan dumps");

  auto* validate = app.add_subcommand("validate", "check a plan against a scenario");
  validate->add_option("--scenario", in_file, "scenario json")->required();
  validate->add_option("--plan", plan_file, "plan json")->required();
  validate->add_flag("--strict-tat", strict_tat);

  double grid_step = 0.05;
  auto* oracle = app.add_subcommand("oracle", "exhaustive joint search on a small case");
  add_topology_opts(oracle);
  oracle->add_option("--in", in_file, "scenario json (overrides --topology)");
  oracle->add_option("--grid-step", grid_step, "share grid resolution");
  oracle->add_option("--r-fold", r_fold);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      auto sc = build_preset(topology, seed, fraction, levels, rows, cols,
                             link_prob, pods, num_nodes, num_links, num_agents);
      save_scenario(sc, out_file);
      std::cout << "wrote " << out_file << " (" << sc.net.num_nodes()
                << " nodes, " << sc.net.num_links() << " links, "
                << sc.agents.size() << " agents)\n";
    } else if (plan->parsed()) {
      scenario sc = in_file.empty()
                        ? build_preset(topology, seed, fraction, levels, rows,
                                       cols, link_prob, pods, num_nodes,
                                       num_links, num_agents)
                        : load_scenario(in_file);
      pipeline_config pc;
      pc.leader_algo = algorithm;
      pc.strict_tat = strict_tat;
      pc.r_fold = r_fold;
      pc.seed = seed;
      auto pr = run_pipeline(sc, pc);
      print_result(pr);
      if (!plan_file.empty()) {
        std::ofstream out(plan_file);
        out << plan_to_json(pr.plan).dump(2) << "\n";
      }
      if (!pr.feasible) return 2;
    } else if (sweep->parsed()) {
      run_experiment(exp_cfg);
      std::cout << "wrote " << exp_cfg.out_dir << "/rows.csv and summary.csv\n";
    } else if (validate->parsed()) {
      scenario sc = load_scenario(in_file);
      std::ifstream in(plan_file);
      if (!in) throw invalid_parameter("cannot open " + plan_file);
      auto p = plan_from_json(nlohmann::json::parse(in));
      auto rep = total_cost(sc.agents, p, sc.net, sc.link_queue_cost,
                            {sc.w_forwarding, sc.w_congestion});
      nlohmann::json j;
      j["feasible"] = rep.checks.feasible(strict_tat);
      j["total_cost"] = rep.total_cost;
      auto collect = [](const check_result& c) { return c.violations; };
      j["violations"] = {
          {"alpha_conservation", collect(rep.checks.alpha_conservation)},
          {"beta_conservation", collect(rep.checks.beta_conservation)},
          {"chain", collect(rep.checks.chain)},
          {"node_capacity", collect(rep.checks.node_capacity)},
          {"link_share", collect(rep.checks.link_share)},
          {"tat", collect(rep.checks.tat)}};
      std::cout << j.dump(2) << "\n";
      if (!rep.checks.feasible(strict_tat)) return 2;
    } else if (oracle->parsed()) {
      scenario sc = in_file.empty()
                        ? build_preset(topology, seed, fraction, levels, rows,
                                       cols, link_prob, pods, num_nodes,
                                       num_links, num_agents)
                        : load_scenario(in_file);
      pipeline_config pc;
      pc.r_fold = r_fold;
      pc.seed = seed;
      auto res = exhaustive_joint_oracle(sc, pc, grid_step);
      nlohmann::json j;
      j["best_total"] = res.best_total;
      j["best_destinations"] = res.best_destinations;
      std::cout << j.dump(2) << "\n";
    }
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
