#pragma once
#include <string>
#include <vector>

#include "json.hpp"
#include "migplan/net.hpp"
#include "migplan/scenario.hpp"

namespace migplan {

// Candidate solution of the joint problem: destination vector D, load-split
// matrix alpha, bandwidth-share matrix beta (fractions of each link's idle
// rate), and chain reconnection paths per agent.
struct migration_plan {
  std::vector<int> destinations;                 // per agent
  std::vector<std::vector<double>> alpha;        // |F| x |E|
  std::vector<std::vector<double>> beta;         // |F| x |E|
  std::vector<path> rho_minus;                   // L-(f) -> D(f)
  std::vector<path> rho_plus;                    // D(f) -> L+(f)
};

struct check_result {
  bool pass = true;
  std::vector<std::string> violations;
};

struct feasibility_report {
  check_result alpha_conservation;
  check_result beta_conservation;
  check_result chain;
  check_result node_capacity;
  check_result link_share;
  check_result tat;

  // the TAT deadline joins the verdict only in strict mode
  bool feasible(bool strict_tat = false) const {
    bool ok = alpha_conservation.pass && beta_conservation.pass && chain.pass &&
              node_capacity.pass && link_share.pass;
    return strict_tat ? ok && tat.pass : ok;
  }
};

struct cost_weights {
  double forwarding = 0.5;
  double congestion = 0.5;
};

struct cost_report {
  std::vector<double> migration_times;  // t(f)
  double forwarding_cost = 0.0;
  double congestion_cost = 0.0;
  double total_cost = 0.0;
  feasibility_report checks;
};

// max over loaded links of V(f) alpha / (B^v(e) beta).
double migration_time(const agent& f, int agent_idx, const migration_plan& plan,
                      const network& net);

double forwarding_cost(const std::vector<agent>& agents,
                       const migration_plan& plan, const network& net);

// throws unbounded_cost_error at the queueing pole.
double congestion_cost(const migration_plan& plan, const network& net,
                       const std::vector<double>& link_queue_cost);

// weighted total plus per-agent times and the full feasibility report.
cost_report total_cost(const std::vector<agent>& agents,
                       const migration_plan& plan, const network& net,
                       const std::vector<double>& link_queue_cost,
                       const cost_weights& w);

check_result check_alpha_conservation(const std::vector<agent>& agents,
                                      const migration_plan& plan,
                                      const network& net);
check_result check_beta_conservation(const std::vector<agent>& agents,
                                     const migration_plan& plan,
                                     const network& net);
check_result check_chain_establishment(const std::vector<agent>& agents,
                                       const migration_plan& plan,
                                       const network& net);
check_result check_node_capacity(const std::vector<agent>& agents,
                                 const migration_plan& plan,
                                 const network& net);
check_result check_link_share(const migration_plan& plan, const network& net);
check_result check_tat(const std::vector<agent>& agents,
                       const migration_plan& plan, const network& net);

feasibility_report validate_plan(const std::vector<agent>& agents,
                                 const migration_plan& plan,
                                 const network& net);

nlohmann::json plan_to_json(const migration_plan& plan);
migration_plan plan_from_json(const nlohmann::json& j);

// Flat record with stable column order:
// scenario,seed,algorithm,forwarding,congestion,total,max_time,feasible
std::string cost_csv_header();
std::string cost_csv_row(const std::string& scenario_id, std::uint64_t seed,
                         const std::string& algorithm, const cost_report& rep,
                         bool strict_tat);

// Consistent numeric formatting for every CSV/dump we emit.
std::string fmt_num(double v);

}  // namespace migplan
