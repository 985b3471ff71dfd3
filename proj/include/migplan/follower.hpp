#pragma once
#include <vector>

#include "migplan/cost.hpp"
#include "migplan/net.hpp"
#include "migplan/scenario.hpp"

namespace migplan {

// Congestion-guarded residuals: B'_v(e) = max{B^v(e) - B(e)/10, 0}.
// The returned network keeps the original nominal rates so the guard can be
// recomputed; queue-cost reporting always uses the original idle rates.
network adjust_residuals(const network& net);
double adjusted_idle_rate(const link_rec& lk);

struct alpha_estimate {
  std::vector<double> row;        // alpha~ per link
  std::vector<path> paths;        // the positive-capacity path set used
  std::vector<double> path_caps;  // kappa(p) under adjusted residuals
};

// Path-proportional load split between S(f) and its destination.
alpha_estimate estimate_alpha(const agent& f, int destination,
                              const network& net, int max_hops);

struct follower_allocation {
  // beta as fractions of each link's *original* idle rate; per-agent rows are
  // path flows, so they conserve through intermediate nodes
  std::vector<std::vector<double>> beta;
  std::vector<double> zeta;  // 1/tau achieved by the joint share split
};

struct follower_options {
  bool strict_tat = false;
  std::size_t lp_budget = 2000000;
};

// Joint bandwidth split across agents (the concave follower-leader program),
// solved as an LP with a max-min fairness tie-break among optimal allocations.
follower_allocation solve_follower_leader(
    const std::vector<agent>& agents, const std::vector<int>& destinations,
    const std::vector<alpha_estimate>& alphas, const network& net,
    const follower_options& opts = {});

struct agent_split {
  std::vector<double> alpha;  // per link
  double tau = 0.0;
};

// Per-agent min-max discharge-time split over the granted rates.
agent_split solve_follower_follower(const agent& f, int destination,
                                    const std::vector<double>& beta_row,
                                    const std::vector<double>& support,
                                    const network& net,
                                    const follower_options& opts = {});

// Sum of c_u(f) R(f) tau(f); second value is the plain sum of tau.
std::pair<double, double> follower_cost(const std::vector<agent>& agents,
                                        const std::vector<double>& tau);

struct follower_oracle_result {
  double forwarding_cost = 0.0;        // min over the grid
  double total_cost = 0.0;             // min weighted total over the grid
  std::vector<double> tau;             // at the forwarding-cost argmin
  std::vector<std::vector<double>> beta;
};

// Exhaustive grid search over per-link share splits with an exact max-flow
// inner solve. Kept independent of the LP path so it can act as an oracle.
follower_oracle_result brute_force_follower(
    const std::vector<agent>& agents, const std::vector<int>& destinations,
    const network& net, const std::vector<double>& link_queue_cost,
    const cost_weights& w, double grid_step, double budget = 5e6);

}  // namespace migplan
