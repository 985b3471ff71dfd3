#include "migplan/cost.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace migplan {

namespace {
constexpr double kTol = 1e-9;
constexpr double kLoadEps = 1e-12;  // alpha/beta entries below this are "zero"

void require_plan_shape(const std::vector<agent>& agents,
                        const migration_plan& plan, const network& net) {
  std::size_t nf = agents.size();
  std::size_t ne = static_cast<std::size_t>(net.num_links());
  if (plan.destinations.size() != nf || plan.alpha.size() != nf ||
      plan.beta.size() != nf)
    throw incomplete_plan_error("plan matrices do not match agent count");
  for (std::size_t f = 0; f < nf; ++f) {
    if (plan.alpha[f].size() != ne || plan.beta[f].size() != ne)
      throw incomplete_plan_error("plan row does not match link count");
    if (plan.destinations[f] < 0 || plan.destinations[f] >= net.num_nodes())
      throw invalid_reference("plan destination outside node set");
  }
}
}  // namespace

double migration_time(const agent& f, int agent_idx, const migration_plan& plan,
                      const network& net) {
  const auto& alpha = plan.alpha.at(agent_idx);
  const auto& beta = plan.beta.at(agent_idx);
  double t = 0.0;
  bool any = false;
  for (int e = 0; e < net.num_links(); ++e) {
    double a = alpha[e];
    if (a <= kLoadEps) continue;
    any = true;
    double rate = net.link(e).idle_rate * beta[e];
    if (beta[e] <= kLoadEps || rate <= kLoadEps)
      throw infeasible_error("agent ships load over a link with no allocated rate");
    t = std::max(t, f.state_size * a / rate);
  }
  if (!any) throw empty_plan_error("agent has an all-zero alpha row");
  return t;
}

double forwarding_cost(const std::vector<agent>& agents,
                       const migration_plan& plan, const network& net) {
  double c = 0.0;
  for (std::size_t f = 0; f < agents.size(); ++f)
    c += agents[f].unit_forward_cost *
         migration_time(agents[f], static_cast<int>(f), plan, net) *
         agents[f].in_rate;
  return c;
}

double congestion_cost(const migration_plan& plan, const network& net,
                       const std::vector<double>& link_queue_cost) {
  if (link_queue_cost.size() != static_cast<std::size_t>(net.num_links()))
    throw invalid_parameter("link queue cost size mismatch");
  double c = 0.0;
  for (int e = 0; e < net.num_links(); ++e) {
    double cb = link_queue_cost[e];
    if (cb <= 0.0) continue;
    double share = 0.0;
    for (const auto& row : plan.beta) share += row[e];
    if (share >= 1.0 - kLoadEps)
      throw unbounded_cost_error("link fully consumed: congestion unbounded");
    double bv = net.link(e).idle_rate;
    if (bv <= kLoadEps)
      throw unbounded_cost_error("saturated link with positive queue cost");
    c += cb * net.link(e).nominal_rate / (bv * (1.0 - share));
  }
  return c;
}

cost_report total_cost(const std::vector<agent>& agents,
                       const migration_plan& plan, const network& net,
                       const std::vector<double>& link_queue_cost,
                       const cost_weights& w) {
  if (std::fabs(w.forwarding + w.congestion - 1.0) > kTol)
    throw invalid_parameter("cost weights must sum to 1");
  require_plan_shape(agents, plan, net);
  cost_report rep;
  for (std::size_t f = 0; f < agents.size(); ++f)
    rep.migration_times.push_back(
        migration_time(agents[f], static_cast<int>(f), plan, net));
  rep.forwarding_cost = 0.0;
  for (std::size_t f = 0; f < agents.size(); ++f)
    rep.forwarding_cost += agents[f].unit_forward_cost *
                           rep.migration_times[f] * agents[f].in_rate;
  rep.congestion_cost = congestion_cost(plan, net, link_queue_cost);
  rep.total_cost =
      w.forwarding * rep.forwarding_cost + w.congestion * rep.congestion_cost;
  rep.checks = validate_plan(agents, plan, net);
  return rep;
}

check_result check_alpha_conservation(const std::vector<agent>& agents,
                                      const migration_plan& plan,
                                      const network& net) {
  check_result res;
  for (std::size_t f = 0; f < agents.size(); ++f) {
    for (int n = 0; n < net.num_nodes(); ++n) {
      double flux = 0.0;
      for (int e = 0; e < net.num_links(); ++e) {
        auto [sb, db] = net.incidence(e, n);
        flux += plan.alpha[f][e] * (db - sb);
      }
      double want = 0.0;
      if (n == plan.destinations[f]) want = 1.0;
      if (n == agents[f].failure_node) want = -1.0;
      if (std::fabs(flux - want) > kTol) {
        res.pass = false;
        res.violations.push_back("alpha_conservation agent " + std::to_string(agents[f].id) +
                                 " node " + std::to_string(n));
      }
    }
  }
  return res;
}

check_result check_beta_conservation(const std::vector<agent>& agents,
                                     const migration_plan& plan,
                                     const network& net) {
  check_result res;
  for (std::size_t f = 0; f < agents.size(); ++f) {
    for (int n = 0; n < net.num_nodes(); ++n) {
      double flux = 0.0;
      for (int e = 0; e < net.num_links(); ++e) {
        auto [sb, db] = net.incidence(e, n);
        flux += plan.beta[f][e] * (db - sb);
      }
      bool ok;
      if (n == plan.destinations[f])
        ok = flux > kTol;
      else if (n == agents[f].failure_node)
        ok = flux < -kTol;
      else
        ok = std::fabs(flux) <= kTol;
      if (!ok) {
        res.pass = false;
        res.violations.push_back("beta_conservation agent " + std::to_string(agents[f].id) +
                                 " node " + std::to_string(n));
      }
    }
  }
  return res;
}

check_result check_chain_establishment(const std::vector<agent>& agents,
                                       const migration_plan& plan,
                                       const network& net) {
  if (plan.rho_minus.size() != agents.size() ||
      plan.rho_plus.size() != agents.size())
    throw incomplete_plan_error("plan lacks chain reconnection paths");
  check_result res;
  for (int e = 0; e < net.num_links(); ++e) {
    double load = 0.0;
    for (std::size_t f = 0; f < agents.size(); ++f) {
      if (path_traverses(e, plan.rho_plus[f])) load += agents[f].out_rate;
      if (path_traverses(e, plan.rho_minus[f])) load += agents[f].in_rate;
    }
    if (load > net.link(e).idle_rate + kTol) {
      res.pass = false;
      res.violations.push_back("chain_capacity link " + std::to_string(e));
    }
  }
  return res;
}

check_result check_node_capacity(const std::vector<agent>& agents,
                                 const migration_plan& plan,
                                 const network& net) {
  check_result res;
  for (int n = 0; n < net.num_nodes(); ++n) {
    double demand = 0.0;
    for (std::size_t f = 0; f < agents.size(); ++f)
      if (plan.destinations[f] == n) demand += agents[f].compute_demand;
    if (demand > net.node(n).idle_compute + kTol) {
      res.pass = false;
      res.violations.push_back("node_capacity node " + std::to_string(n));
    }
  }
  return res;
}

check_result check_link_share(const migration_plan& plan, const network& net) {
  check_result res;
  for (int e = 0; e < net.num_links(); ++e) {
    double share = 0.0;
    for (const auto& row : plan.beta) share += row[e];
    if (share > 1.0 + kTol) {
      res.pass = false;
      res.violations.push_back("link_share link " + std::to_string(e));
    }
  }
  return res;
}

check_result check_tat(const std::vector<agent>& agents,
                       const migration_plan& plan, const network& net) {
  check_result res;
  for (std::size_t f = 0; f < agents.size(); ++f) {
    double t = migration_time(agents[f], static_cast<int>(f), plan, net);
    if (t > agents[f].tat + kTol) {
      res.pass = false;
      res.violations.push_back("tat agent " + std::to_string(agents[f].id));
    }
  }
  return res;
}

feasibility_report validate_plan(const std::vector<agent>& agents,
                                 const migration_plan& plan,
                                 const network& net) {
  require_plan_shape(agents, plan, net);
  feasibility_report rep;
  rep.alpha_conservation = check_alpha_conservation(agents, plan, net);
  rep.beta_conservation = check_beta_conservation(agents, plan, net);
  rep.chain = check_chain_establishment(agents, plan, net);
  rep.node_capacity = check_node_capacity(agents, plan, net);
  rep.link_share = check_link_share(plan, net);
  rep.tat = check_tat(agents, plan, net);
  return rep;
}

namespace {
nlohmann::json path_to_json(const path& p) {
  return {{"nodes", p.nodes}, {"links", p.links}};
}
path path_from_json(const nlohmann::json& j) {
  path p;
  p.nodes = j.at("nodes").get<std::vector<int>>();
  p.links = j.at("links").get<std::vector<int>>();
  return p;
}
}  // namespace

nlohmann::json plan_to_json(const migration_plan& plan) {
  nlohmann::json j;
  j["destinations"] = plan.destinations;
  j["alpha"] = plan.alpha;
  j["beta"] = plan.beta;
  j["rho_minus"] = nlohmann::json::array();
  for (const auto& p : plan.rho_minus) j["rho_minus"].push_back(path_to_json(p));
  j["rho_plus"] = nlohmann::json::array();
  for (const auto& p : plan.rho_plus) j["rho_plus"].push_back(path_to_json(p));
  return j;
}

migration_plan plan_from_json(const nlohmann::json& j) {
  migration_plan plan;
  plan.destinations = j.at("destinations").get<std::vector<int>>();
  plan.alpha = j.at("alpha").get<std::vector<std::vector<double>>>();
  plan.beta = j.at("beta").get<std::vector<std::vector<double>>>();
  for (const auto& pj : j.at("rho_minus"))
    plan.rho_minus.push_back(path_from_json(pj));
  for (const auto& pj : j.at("rho_plus"))
    plan.rho_plus.push_back(path_from_json(pj));
  return plan;
}

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string cost_csv_header() {
  return "scenario,seed,algorithm,forwarding,congestion,total,max_time,feasible";
}

std::string cost_csv_row(const std::string& scenario_id, std::uint64_t seed,
                         const std::string& algorithm, const cost_report& rep,
                         bool strict_tat) {
  double max_t = 0.0;
  for (double t : rep.migration_times) max_t = std::max(max_t, t);
  return scenario_id + "," + std::to_string(seed) + "," + algorithm + "," +
         fmt_num(rep.forwarding_cost) + "," + fmt_num(rep.congestion_cost) +
         "," + fmt_num(rep.total_cost) + "," + fmt_num(max_t) + "," +
         (rep.checks.feasible(strict_tat) ? "1" : "0");
}

}  // namespace migplan
