#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "migplan/cost.hpp"
#include "migplan/follower.hpp"
#include "migplan/leader.hpp"
#include "migplan/scenario.hpp"

namespace migplan {

struct pipeline_config {
  std::string leader_algo = "viterbi";  // viterbi|exhaustive|greedy|random
  bool strict_tat = false;
  double r_fold = 0.1;      // retransfer folding: V'(f) = V(f) (1 + r_fold)
  std::uint64_t seed = 0;   // drives the random leader
  double exhaustive_budget = 2e6;
  std::size_t lp_budget = 2000000;
};

struct pipeline_result {
  leader_result leader;
  migration_plan plan;
  cost_report report;
  bool feasible = false;
  std::vector<double> tau;   // per agent, from the load-split phase
  std::vector<double> zeta;  // 1/tau
};

// leader -> residual adjustment -> joint bandwidth split -> per-agent load
// split -> validation. Throws phase-tagged errors on failure.
pipeline_result run_pipeline(const scenario& sc, const pipeline_config& cfg);

// Follower phases only, for a fixed destination vector with chain paths.
pipeline_result run_follower_phases(const scenario& sc_folded,
                                    const leader_result& leader,
                                    const pipeline_config& cfg);

struct joint_oracle_result {
  double best_total = 0.0;
  std::vector<int> best_destinations;
};

// Minimum weighted total cost over every feasible joint destination
// assignment, with both the grid follower oracle and the two-phase follower
// as allocation candidates per assignment.
joint_oracle_result exhaustive_joint_oracle(const scenario& sc,
                                            const pipeline_config& cfg,
                                            double grid_step = 0.05,
                                            double leader_budget = 2e6);

// ---- preset scenario builders (the desk-scale experiment families) ----

scenario make_trapezoid_scenario(int levels, const trapezoid_params& tp,
                                 double failure_fraction, std::uint64_t seed,
                                 int max_failures = 0, bool sample_loads = false,
                                 double c_r_max = 10.0);
scenario make_grid_scenario(int rows, int cols, double link_prob,
                            double failure_fraction, std::uint64_t seed,
                            int max_failures = 0);
scenario make_three_tier_scenario(int pods, double failure_fraction,
                                  std::uint64_t seed, int max_failures = 0);
// Random digraph with exactly num_links links; used by the oracle-bound
// experiments. Agents are drawn from the regular pool.
scenario make_small_scenario(int num_nodes, int num_links, int num_agents,
                             std::uint64_t seed);

struct experiment_config {
  std::string preset;  // fig1 | fig2 | fig3 | fig4 | fig5
  int num_seeds = 30;
  std::uint64_t seed0 = 1;
  std::string out_dir = "out";
  bool strict_tat = false;
  double r_fold = 0.1;
  bool dump_plans = true;
};

// One CSV row per run plus per-cell mean/stddev aggregates. Per-run failures
// are recorded as status rows and never abort the sweep.
void run_experiment(const experiment_config& cfg);

std::string sweep_csv_header();

}  // namespace migplan
