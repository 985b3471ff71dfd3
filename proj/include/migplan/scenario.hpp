#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "migplan/net.hpp"

namespace migplan {

// A failed VNF awaiting migration.
struct agent {
  int id = 0;
  double state_size = 1.0;        // V(f)
  double tat = 1.0;               // T(f)
  double compute_demand = 1.0;    // C_r(f)
  double in_rate = 0.0;           // R(f)
  double out_rate = 0.0;          // R+(f)
  int failure_node = 0;           // S(f)
  int prev_hop = 0;               // L-(f)
  int next_hop = 0;               // L+(f)
  double unit_forward_cost = 1.0; // c_u(f)
};

struct scenario {
  std::string name;
  network net;
  std::vector<agent> agents;

  // cost weights
  double w_forwarding = 0.5;
  double w_congestion = 0.5;
  // leader utility weights
  double w_n = 1.0 / 3.0;
  double w_l = 1.0 / 3.0;
  double w_p = 1.0 / 3.0;
  // emission utility weights
  double w_b = 1.0 / 3.0;
  double w_c = 1.0 / 3.0;
  double w_i = 1.0 / 3.0;

  std::vector<double> link_queue_cost;  // c_b(e), one per link
  int max_hops = 3;
  std::uint64_t seed = 0;

  // throws invalid_parameter on any broken invariant
  void validate() const;
};

struct trapezoid_params {
  int top_width = 4;
  double p_idle = 0.5;
  double nominal_rate = 10.0;
  double idle_rate = 5.0;  // equal idle resources on every link
  double node_compute = 10.0;
};

struct grid_params {
  double p_idle = 0.5;
  double nominal_rate = 10.0;
  double idle_rate = 5.0;
  double node_compute = 10.0;
};

struct three_tier_params {
  double p_idle = 0.5;
  double nominal_rate = 10.0;
  double idle_rate = 5.0;
  double node_compute = 10.0;
  int agg_per_pod = 2;
  int edge_per_pod = 6;
};

// Layered directed network with widths top_width, top_width-1, ... (min 1),
// complete bipartite between consecutive levels, links pointing downward.
network gen_trapezoid(int levels, const trapezoid_params& p, std::uint64_t seed);

// rows*cols nodes, each ordered pair independently linked with link_prob.
network gen_grid_random(int rows, int cols, double link_prob,
                        const grid_params& p, std::uint64_t seed);

// Core/aggregation/edge datacenter template: `pods` core nodes plus, per pod,
// agg_per_pod aggregation and edge_per_pod edge nodes (defaults give 9*pods
// nodes, so pods 2..5 span 18..45). Core<->agg and agg<->edge both ways.
network gen_three_tier(int pods, const three_tier_params& p, std::uint64_t seed);

// Redraw every node's idle compute uniformly from [c_r_max/2, c_r_max].
network sample_node_loads(const network& net, double c_r_max, std::uint64_t seed);

struct agent_pool_params {
  double v_lo = 1.0, v_hi = 10.0;    // state size
  double t_lo = 1.0, t_hi = 5.0;     // TAT
  double c_lo = 1.0, c_hi = 5.0;     // compute demand
  double r_lo = 0.1, r_hi = 1.0;     // in/out rates
  double unit_forward_cost = 1.0;
};

// One candidate agent per non-idle node. Chain neighbors are picked so that
// intermediate destinations exist: prev hop from in-neighbors of S (falling
// back to fellow in-degree-0 sources), next hop from nodes at hop distance
// >= 2 from S (falling back to out-neighbors, then any other node).
std::vector<agent> make_agent_pool(const network& net,
                                   const agent_pool_params& p,
                                   std::uint64_t seed);

// ceil(fraction*|pool|) agents chosen uniformly without replacement,
// keeping pool order.
std::vector<agent> inject_failures(const std::vector<agent>& pool,
                                   double fraction, std::uint64_t seed);

nlohmann::json network_to_json(const network& net);
network network_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const scenario& sc);
scenario scenario_from_json(const nlohmann::json& j);
scenario load_scenario(const std::string& file);
void save_scenario(const scenario& sc, const std::string& file);

}  // namespace migplan
