#include "migplan/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#include "migplan/rng.hpp"

namespace migplan {

namespace {

scenario fold_retransfer(const scenario& sc, double r_fold) {
  scenario out = sc;
  for (auto& f : out.agents) f.state_size *= 1.0 + r_fold;
  return out;
}

leader_result run_leader(const scenario& sc, capacity_cache& cache,
                         const pipeline_config& cfg) {
  if (cfg.leader_algo == "viterbi") return viterbi_leader(sc, cache);
  if (cfg.leader_algo == "exhaustive")
    return exhaustive_leader(sc, cache, cfg.exhaustive_budget);
  if (cfg.leader_algo == "greedy") return greedy_sort_leader(sc, cache);
  if (cfg.leader_algo == "random") return random_leader(sc, cache, cfg.seed);
  throw invalid_parameter("unknown leader algorithm: " + cfg.leader_algo);
}

template <typename Fn>
auto tagged(const char* phase, Fn&& fn) {
  try {
    return fn();
  } catch (const invalid_parameter&) {
    throw;  // configuration mistakes keep their own type
  } catch (const error& e) {
    throw infeasible_error(std::string(phase) + ": " + e.what());
  }
}

}  // namespace

pipeline_result run_follower_phases(const scenario& sc_folded,
                                    const leader_result& leader,
                                    const pipeline_config& cfg) {
  const network& net = sc_folded.net;
  const auto& agents = sc_folded.agents;

  follower_options fopts;
  fopts.strict_tat = cfg.strict_tat;
  fopts.lp_budget = cfg.lp_budget;

  std::vector<alpha_estimate> alphas;
  for (std::size_t f = 0; f < agents.size(); ++f)
    alphas.push_back(tagged("alpha-estimate", [&] {
      return estimate_alpha(agents[f], leader.destinations[f], net,
                            sc_folded.max_hops);
    }));

  auto alloc = tagged("follower-leader", [&] {
    return solve_follower_leader(agents, leader.destinations, alphas, net,
                                 fopts);
  });

  pipeline_result res;
  res.leader = leader;
  res.plan.destinations = leader.destinations;
  res.plan.rho_minus = leader.rho_minus;
  res.plan.rho_plus = leader.rho_plus;
  res.plan.beta = alloc.beta;
  for (std::size_t f = 0; f < agents.size(); ++f) {
    auto split = tagged("follower-follower", [&] {
      return solve_follower_follower(agents[f], leader.destinations[f],
                                     alloc.beta[f], alphas[f].row, net, fopts);
    });
    res.plan.alpha.push_back(split.alpha);
    res.tau.push_back(split.tau);
    res.zeta.push_back(1.0 / split.tau);
  }

  res.report = total_cost(agents, res.plan, net, sc_folded.link_queue_cost,
                          {sc_folded.w_forwarding, sc_folded.w_congestion});
  res.feasible = res.report.checks.feasible(cfg.strict_tat);
  return res;
}

pipeline_result run_pipeline(const scenario& sc, const pipeline_config& cfg) {
  sc.validate();
  scenario folded = fold_retransfer(sc, cfg.r_fold);
  capacity_cache cache(folded.net);
  auto leader =
      tagged("leader", [&] { return run_leader(folded, cache, cfg); });
  return run_follower_phases(folded, leader, cfg);
}

joint_oracle_result exhaustive_joint_oracle(const scenario& sc,
                                            const pipeline_config& cfg,
                                            double grid_step,
                                            double leader_budget) {
  scenario folded = fold_retransfer(sc, cfg.r_fold);
  const network& net = folded.net;
  const auto& agents = folded.agents;
  capacity_cache cache(net);
  auto tour = priority_tour(agents, net);

  residual_state pristine = residual_state::make(net);
  double combos = 1.0;
  for (const auto& f : agents) {
    combos *= static_cast<double>(std::max<std::size_t>(
        1, candidate_set_nothrow(net, pristine, f, folded.max_hops).size()));
    if (combos > leader_budget)
      throw oracle_too_large_error("joint oracle budget exceeded");
  }

  joint_oracle_result best;
  best.best_total = std::numeric_limits<double>::infinity();

  residual_state res = residual_state::make(net);
  leader_result cand;
  cand.destinations.assign(agents.size(), -1);
  cand.rho_minus.resize(agents.size());
  cand.rho_plus.resize(agents.size());

  auto evaluate = [&]() {
    double total = std::numeric_limits<double>::infinity();
    try {
      auto grid = brute_force_follower(agents, cand.destinations, net,
                                       folded.link_queue_cost,
                                       {folded.w_forwarding, folded.w_congestion},
                                       grid_step);
      total = std::min(total, grid.total_cost);
    } catch (const error&) {
    }
    try {
      auto two_phase = run_follower_phases(folded, cand, cfg);
      total = std::min(total, two_phase.report.total_cost);
    } catch (const error&) {
    }
    if (total < best.best_total) {
      best.best_total = total;
      best.best_destinations = cand.destinations;
    }
  };

  auto dfs = [&](auto&& self, std::size_t k) -> void {
    if (k == tour.size()) {
      evaluate();
      return;
    }
    const agent& f = agents[tour[k]];
    for (int n = 0; n < net.num_nodes(); ++n) {
      auto rec = commit_agent(net, res, f, n, folded.max_hops);
      if (!rec) continue;
      cand.destinations[tour[k]] = n;
      cand.rho_minus[tour[k]] = rec->rho_minus;
      cand.rho_plus[tour[k]] = rec->rho_plus;
      self(self, k + 1);
      undo_commit(net, res, f, *rec);
    }
  };
  dfs(dfs, 0);

  if (!std::isfinite(best.best_total))
    throw infeasible_error("joint oracle found no feasible allocation");
  return best;
}

// ---- scenario builders ----

namespace {
void finish_scenario(scenario& sc, const std::string& name,
                     double failure_fraction, std::uint64_t seed,
                     int max_failures) {
  sc.name = name;
  sc.seed = seed;
  sc.link_queue_cost.assign(sc.net.num_links(), 1.0);
  auto pool = make_agent_pool(sc.net, {}, seed * 2654435761u + 1);
  if (pool.empty()) throw invalid_parameter("topology yields an empty pool");
  sc.agents = inject_failures(pool, failure_fraction, seed * 2654435761u + 2);
  if (max_failures > 0 &&
      sc.agents.size() > static_cast<std::size_t>(max_failures))
    sc.agents.resize(max_failures);
  sc.validate();
}
}  // namespace

scenario make_trapezoid_scenario(int levels, const trapezoid_params& tp,
                                 double failure_fraction, std::uint64_t seed,
                                 int max_failures, bool sample_loads,
                                 double c_r_max) {
  scenario sc;
  sc.net = gen_trapezoid(levels, tp, seed);
  if (sample_loads)
    sc.net = sample_node_loads(sc.net, c_r_max, seed * 2654435761u + 3);
  sc.max_hops = levels;
  finish_scenario(sc, "trapezoid" + std::to_string(levels), failure_fraction,
                  seed, max_failures);
  return sc;
}

scenario make_grid_scenario(int rows, int cols, double link_prob,
                            double failure_fraction, std::uint64_t seed,
                            int max_failures) {
  scenario sc;
  sc.net = gen_grid_random(rows, cols, link_prob, {}, seed);
  sc.max_hops = 2;
  finish_scenario(sc,
                  "grid" + std::to_string(rows) + "x" + std::to_string(cols),
                  failure_fraction, seed, max_failures);
  return sc;
}

scenario make_three_tier_scenario(int pods, double failure_fraction,
                                  std::uint64_t seed, int max_failures) {
  scenario sc;
  sc.net = gen_three_tier(pods, {}, seed);
  sc.max_hops = 4;
  finish_scenario(sc, "three_tier" + std::to_string(pods), failure_fraction,
                  seed, max_failures);
  return sc;
}

scenario make_small_scenario(int num_nodes, int num_links, int num_agents,
                             std::uint64_t seed) {
  if (num_nodes < 2) throw invalid_parameter("need at least 2 nodes");
  std::size_t pairs =
      static_cast<std::size_t>(num_nodes) * (num_nodes - 1);
  if (static_cast<std::size_t>(num_links) > pairs)
    throw invalid_parameter("too many links requested");
  rng r(seed);
  auto picked = r.sample_without_replacement(pairs, num_links);

  std::vector<node_rec> nodes(num_nodes);
  for (auto& nd : nodes) {
    nd.idle_compute = 10.0;
    nd.idle = r.bernoulli(0.3);
  }
  // one idle rate shared by every link, matching the preset topologies
  double idle_rate = r.uniform(3.0, 8.0);
  std::vector<link_rec> links;
  for (std::size_t id : picked) {
    int u = static_cast<int>(id / (num_nodes - 1));
    int off = static_cast<int>(id % (num_nodes - 1));
    int v = off >= u ? off + 1 : off;
    links.push_back({u, v, 10.0, idle_rate});
  }
  scenario sc;
  sc.net = network(std::move(nodes), std::move(links));
  sc.max_hops = num_nodes - 1;
  finish_scenario(sc, "small" + std::to_string(num_nodes), 1.0, seed, 0);
  if (sc.agents.size() > static_cast<std::size_t>(num_agents))
    sc.agents.resize(num_agents);
  return sc;
}

// ---- experiment harness ----

std::string sweep_csv_header() {
  return "scenario,seed,algorithm,status,u_n,u_l,u_p,utility,forwarding,"
         "congestion,total,max_time,feasible";
}

namespace {

struct sweep_row {
  std::string scenario_id;
  std::uint64_t seed = 0;
  std::string algorithm;
  std::string status = "ok";
  bool has_utility = false;
  double u_n = 0, u_l = 0, u_p = 0, utility = 0;
  bool has_cost = false;
  double forwarding = 0, congestion = 0, total = 0, max_time = 0;
  int feasible = 0;

  std::string csv() const {
    auto opt = [](bool has, double v) { return has ? fmt_num(v) : ""; };
    return scenario_id + "," + std::to_string(seed) + "," + algorithm + "," +
           status + "," + opt(has_utility, u_n) + "," + opt(has_utility, u_l) +
           "," + opt(has_utility, u_p) + "," + opt(has_utility, utility) +
           "," + opt(has_cost, forwarding) + "," + opt(has_cost, congestion) +
           "," + opt(has_cost, total) + "," + opt(has_cost, max_time) + "," +
           (has_cost ? std::to_string(feasible) : "") ;
  }
};

struct cell_stats {
  std::vector<double> utilities, totals;
};

void fill_leader(sweep_row& row, const leader_result& lr) {
  row.has_utility = true;
  row.u_n = lr.u_n;
  row.u_l = lr.u_l;
  row.u_p = lr.u_p;
  row.utility = lr.total;
}

void fill_cost(sweep_row& row, const pipeline_result& pr, bool strict) {
  row.has_cost = true;
  row.forwarding = pr.report.forwarding_cost;
  row.congestion = pr.report.congestion_cost;
  row.total = pr.report.total_cost;
  for (double t : pr.report.migration_times)
    row.max_time = std::max(row.max_time, t);
  row.feasible = pr.report.checks.feasible(strict) ? 1 : 0;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

void run_experiment(const experiment_config& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  if (cfg.dump_plans) fs::create_directories(cfg.out_dir + "/plans");

  std::vector<sweep_row> rows;
  std::map<std::pair<std::string, std::string>, cell_stats> cells;

  auto leader_only_run = [&](const scenario& sc, std::uint64_t seed,
                             const std::string& algo) {
    sweep_row row;
    row.scenario_id = sc.name;
    row.seed = seed;
    row.algorithm = algo;
    try {
      capacity_cache cache(sc.net);
      pipeline_config pc;
      pc.leader_algo = algo;
      pc.seed = seed;
      leader_result lr = [&] {
        if (algo == "viterbi") return viterbi_leader(sc, cache);
        if (algo == "exhaustive") return exhaustive_leader(sc, cache);
        if (algo == "greedy") return greedy_sort_leader(sc, cache);
        if (algo == "random") return random_leader(sc, cache, seed);
        throw invalid_parameter("unknown algorithm " + algo);
      }();
      fill_leader(row, lr);
      cells[{sc.name, algo}].utilities.push_back(lr.total);
    } catch (const error& e) {
      row.status = std::string("error: ") + e.what();
    }
    rows.push_back(row);
  };

  auto pipeline_run = [&](const scenario& sc, std::uint64_t seed,
                          const std::string& algo) {
    sweep_row row;
    row.scenario_id = sc.name;
    row.seed = seed;
    row.algorithm = algo;
    try {
      pipeline_config pc;
      pc.leader_algo = algo;
      pc.seed = seed;
      pc.strict_tat = cfg.strict_tat;
      pc.r_fold = cfg.r_fold;
      auto pr = run_pipeline(sc, pc);
      fill_leader(row, pr.leader);
      fill_cost(row, pr, cfg.strict_tat);
      cells[{sc.name, algo}].utilities.push_back(pr.leader.total);
      cells[{sc.name, algo}].totals.push_back(pr.report.total_cost);
      if (cfg.dump_plans) {
        std::ofstream out(cfg.out_dir + "/plans/" + sc.name + "_" +
                          std::to_string(seed) + "_" + algo + ".json");
        out << plan_to_json(pr.plan).dump(2) << "\n";
      }
    } catch (const error& e) {
      row.status = std::string("error: ") + e.what();
    }
    rows.push_back(row);
  };

  const auto seeds = [&] {
    std::vector<std::uint64_t> s;
    for (int i = 0; i < cfg.num_seeds; ++i) s.push_back(cfg.seed0 + i);
    return s;
  }();

  if (cfg.preset == "fig1") {
    for (auto seed : seeds)
      for (const char* algo : {"exhaustive", "viterbi", "greedy", "random"})
        leader_only_run(
            make_trapezoid_scenario(3, {4, 0.5, 10.0, 5.0, 10.0}, 0.05, seed, 1),
            seed, algo);
  } else if (cfg.preset == "fig2") {
    for (auto seed : seeds)
      for (const char* algo : {"exhaustive", "viterbi", "greedy", "random"})
        leader_only_run(make_trapezoid_scenario(3, {4, 0.5, 10.0, 5.0, 10.0},
                                                0.05, seed, 1, true, 10.0),
                        seed, algo);
  } else if (cfg.preset == "fig3") {
    for (double fraction : {0.1, 0.2, 0.4}) {
      for (auto seed : seeds) {
        auto sc = make_grid_scenario(10, 10, 0.5, fraction, seed);
        sc.name += "_f" + fmt_num(fraction);
        for (const char* algo : {"viterbi", "greedy", "random"})
          leader_only_run(sc, seed, algo);
      }
    }
  } else if (cfg.preset == "fig4") {
    for (auto seed : seeds) {
      auto sc = make_small_scenario(6, 8, 2, seed);
      pipeline_run(sc, seed, "viterbi");
      sweep_row row;
      row.scenario_id = sc.name;
      row.seed = seed;
      row.algorithm = "joint_oracle";
      try {
        pipeline_config pc;
        pc.seed = seed;
        auto oracle = exhaustive_joint_oracle(sc, pc);
        row.has_cost = true;
        row.total = oracle.best_total;
        cells[{sc.name, "joint_oracle"}].totals.push_back(oracle.best_total);
      } catch (const error& e) {
        row.status = std::string("error: ") + e.what();
      }
      rows.push_back(row);
    }
  } else if (cfg.preset == "fig5") {
    for (int pods : {2, 3, 4, 5})
      for (auto seed : seeds)
        for (const char* algo : {"viterbi", "greedy"})
          pipeline_run(make_three_tier_scenario(pods, 0.1, seed, 3), seed,
                       algo);
  } else {
    throw invalid_parameter("unknown preset: " + cfg.preset);
  }

  {
    std::ofstream out(cfg.out_dir + "/rows.csv");
    out << sweep_csv_header() << "\n";
    for (const auto& row : rows) out << row.csv() << "\n";
  }
  {
    std::ofstream out(cfg.out_dir + "/summary.csv");
    out << "scenario,algorithm,n,utility_mean,utility_std,total_mean,"
           "total_std\n";
    for (const auto& [key, st] : cells) {
      std::size_t n = std::max(st.utilities.size(), st.totals.size());
      out << key.first << "," << key.second << "," << n << ","
          << fmt_num(mean_of(st.utilities)) << ","
          << fmt_num(stddev_of(st.utilities)) << ","
          << fmt_num(mean_of(st.totals)) << ","
          << fmt_num(stddev_of(st.totals)) << "\n";
    }
  }
}

}  // namespace migplan
