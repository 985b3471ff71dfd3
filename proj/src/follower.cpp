#include "migplan/follower.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "migplan/lp.hpp"

namespace migplan {

namespace {
constexpr double kTol = 1e-9;
}

double adjusted_idle_rate(const link_rec& lk) {
  return std::max(lk.idle_rate - lk.nominal_rate / 10.0, 0.0);
}

network adjust_residuals(const network& net) {
  std::vector<link_rec> links = net.links();
  for (auto& lk : links) lk.idle_rate = adjusted_idle_rate(lk);
  return network(net.nodes(), std::move(links));
}

alpha_estimate estimate_alpha(const agent& f, int destination,
                              const network& net, int max_hops) {
  auto paths = net.enumerate_paths(f.failure_node, destination, max_hops);
  if (paths.empty())
    throw infeasible_error("agent " + std::to_string(f.id) +
                           ": destination unreachable from failure point");
  alpha_estimate est;
  est.row.assign(net.num_links(), 0.0);
  double total = 0.0;
  for (const auto& p : paths) {
    double kappa = std::numeric_limits<double>::infinity();
    for (int e : p.links)
      kappa = std::min(kappa, adjusted_idle_rate(net.link(e)));
    if (kappa <= kTol) continue;
    est.paths.push_back(p);
    est.path_caps.push_back(kappa);
    total += kappa;
    for (int e : p.links) est.row[e] += kappa;
  }
  if (total <= kTol)
    throw infeasible_error("agent " + std::to_string(f.id) +
                           ": zero aggregate path capacity");
  for (double& a : est.row) a /= total;
  return est;
}

follower_allocation solve_follower_leader(
    const std::vector<agent>& agents, const std::vector<int>& destinations,
    const std::vector<alpha_estimate>& alphas, const network& net,
    const follower_options& opts) {
  const std::size_t nf = agents.size();
  if (destinations.size() != nf || alphas.size() != nf)
    throw invalid_parameter("follower-leader input size mismatch");

  // variable layout: per-agent path flows y (beta in B^v fraction units,
  // routed along paths so each row conserves), per-path delivered rates r
  // (the rate a path really carries is its bottleneck B^v(e) y), then zeta
  std::vector<std::size_t> y_base(nf), r_base(nf);
  std::size_t nvar = 0;
  for (std::size_t f = 0; f < nf; ++f) {
    y_base[f] = nvar;
    nvar += alphas[f].paths.size();
  }
  for (std::size_t f = 0; f < nf; ++f) {
    r_base[f] = nvar;
    nvar += alphas[f].paths.size();
  }
  std::size_t zeta_base = nvar;
  nvar += nf;

  linear_program lp;
  lp.objective.assign(nvar, 0.0);
  std::vector<double> weight(nf);
  for (std::size_t f = 0; f < nf; ++f)
    weight[f] = std::max(agents[f].unit_forward_cost * agents[f].in_rate, 1e-9);

  auto add_row = [&](std::vector<double> row, double bound) {
    lp.a.push_back(std::move(row));
    lp.b.push_back(bound);
  };

  // r_fp <= B^v(e) y_fp along the path, and V zeta_f <= sum of path rates
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t p = 0; p < alphas[f].paths.size(); ++p) {
      for (int e : alphas[f].paths[p].links) {
        std::vector<double> row(nvar, 0.0);
        row[r_base[f] + p] = 1.0;
        row[y_base[f] + p] = -net.link(e).idle_rate;
        add_row(std::move(row), 0.0);
      }
    }
    std::vector<double> row(nvar, 0.0);
    row[zeta_base + f] = agents[f].state_size;
    for (std::size_t p = 0; p < alphas[f].paths.size(); ++p)
      row[r_base[f] + p] = -1.0;
    add_row(std::move(row), 0.0);
  }

  // per-link share cap, guarded away from the congestion pole
  std::map<int, std::vector<std::pair<std::size_t, double>>> link_terms;
  for (std::size_t f = 0; f < nf; ++f)
    for (std::size_t p = 0; p < alphas[f].paths.size(); ++p)
      for (int e : alphas[f].paths[p].links)
        link_terms[e].push_back({y_base[f] + p, 1.0});
  for (const auto& [e, terms] : link_terms) {
    double bv = net.link(e).idle_rate;
    double cap = bv > kTol ? adjusted_idle_rate(net.link(e)) / bv : 0.0;
    std::vector<double> row(nvar, 0.0);
    for (const auto& [var, coef] : terms) row[var] += coef;
    add_row(std::move(row), cap);
  }

  if (opts.strict_tat) {
    for (std::size_t f = 0; f < nf; ++f) {
      std::vector<double> row(nvar, 0.0);
      row[zeta_base + f] = -1.0;
      add_row(std::move(row), -1.0 / agents[f].tat);
    }
  }

  lp_options lo;
  lo.max_nonzeros = opts.lp_budget;

  // The discharge cost sum_f w_f / zeta_f is convex over the rate polytope
  // but not linear, so the joint split runs in two moves. First an
  // egalitarian pass maximizes the worst rate; besides proving feasibility it
  // yields the bound zeta_f >= w_f / C_egal that every cost improvement must
  // respect (a single term already exceeding the egalitarian cost cannot be
  // optimal). Then supporting-hyperplane iterations minimize the true cost:
  // each round linearizes w/zeta at the incumbent and re-solves, which
  // converges to the global optimum over the compact feasible set.
  lp_result sol;
  {
    linear_program egal = lp;
    std::size_t tvar = nvar;
    egal.objective.assign(nvar + 1, 0.0);
    egal.objective[tvar] = 1.0;
    for (auto& row : egal.a) row.push_back(0.0);
    for (std::size_t f = 0; f < nf; ++f) {
      std::vector<double> row(nvar + 1, 0.0);
      row[tvar] = 1.0;
      row[zeta_base + f] = -1.0;
      egal.a.push_back(std::move(row));
      egal.b.push_back(0.0);
    }
    auto egal_sol = lp_solve(egal, lo);
    if (egal_sol.status != lp_status::optimal ||
        egal_sol.objective <= 1e-12)
      throw infeasible_error("follower-leader program infeasible");

    double cost_egal = 0.0;
    for (std::size_t f = 0; f < nf; ++f)
      cost_egal += weight[f] / std::max(egal_sol.x[zeta_base + f], 1e-12);

    // epigraph variables s_f >= w_f / zeta_f
    linear_program cut = lp;
    std::size_t s_base = nvar;
    cut.objective.assign(nvar + nf, 0.0);
    for (std::size_t f = 0; f < nf; ++f) cut.objective[s_base + f] = -1.0;
    for (auto& row : cut.a) row.resize(nvar + nf, 0.0);
    for (std::size_t f = 0; f < nf; ++f) {
      std::vector<double> row(nvar + nf, 0.0);
      row[zeta_base + f] = -1.0;
      cut.a.push_back(std::move(row));
      cut.b.push_back(-weight[f] / cost_egal);
    }
    auto add_cut = [&](std::size_t f, double z0) {
      // w/z >= 2 w/z0 - (w/z0^2) z for every z > 0
      std::vector<double> row(nvar + nf, 0.0);
      row[s_base + f] = -1.0;
      row[zeta_base + f] = -weight[f] / (z0 * z0);
      cut.a.push_back(std::move(row));
      cut.b.push_back(-2.0 * weight[f] / z0);
    };

    std::vector<double> point(nf);
    for (std::size_t f = 0; f < nf; ++f)
      point[f] = std::max(egal_sol.x[zeta_base + f], weight[f] / cost_egal);
    double best_cost = cost_egal;
    egal_sol.x.resize(nvar);
    sol = egal_sol;
    sol.status = lp_status::optimal;
    for (int iter = 0; iter < 60; ++iter) {
      for (std::size_t f = 0; f < nf; ++f) add_cut(f, point[f]);
      auto it_sol = lp_solve(cut, lo);
      if (it_sol.status != lp_status::optimal) break;
      double cost = 0.0;
      for (std::size_t f = 0; f < nf; ++f) {
        point[f] = std::max(it_sol.x[zeta_base + f], 1e-12);
        cost += weight[f] / point[f];
      }
      if (cost < best_cost - 1e-12) {
        best_cost = cost;
        it_sol.x.resize(nvar);
        sol.x = it_sol.x;
      }
      double lower = -it_sol.objective;  // sum of epigraph variables
      if (best_cost - lower <= 1e-9 * std::max(1.0, best_cost)) break;
    }
  }

  follower_allocation out;
  out.beta.assign(nf, std::vector<double>(net.num_links(), 0.0));
  out.zeta.assign(nf, 0.0);
  for (std::size_t f = 0; f < nf; ++f) {
    out.zeta[f] = sol.x[zeta_base + f];
    if (out.zeta[f] <= 1e-12)
      throw infeasible_error("agent " + std::to_string(agents[f].id) +
                             ": no migration bandwidth allocatable");
    for (std::size_t p = 0; p < alphas[f].paths.size(); ++p) {
      double y = sol.x[y_base[f] + p];
      if (y <= 0.0) continue;
      for (int e : alphas[f].paths[p].links) out.beta[f][e] += y;
    }
  }
  return out;
}

agent_split solve_follower_follower(const agent& f, int destination,
                                    const std::vector<double>& beta_row,
                                    const std::vector<double>& support,
                                    const network& net,
                                    const follower_options& opts) {
  // usable links: loaded in the estimate and granted a positive rate
  std::vector<int> links;
  for (int e = 0; e < net.num_links(); ++e)
    if (support[e] > kTol && net.link(e).idle_rate * beta_row[e] > kTol)
      links.push_back(e);
  if (links.empty())
    throw infeasible_error("agent " + std::to_string(f.id) +
                           ": no granted capacity to split load over");

  std::vector<int> nodes;
  for (int e : links) {
    nodes.push_back(net.link(e).src);
    nodes.push_back(net.link(e).dst);
  }
  nodes.push_back(f.failure_node);
  nodes.push_back(destination);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  const std::size_t ne = links.size();
  const std::size_t tau_var = ne;
  linear_program lp;
  lp.objective.assign(ne + 1, 0.0);
  lp.objective[tau_var] = -1.0;  // minimize tau

  // tau >= V alpha_e / rate_e
  for (std::size_t i = 0; i < ne; ++i) {
    double rate = net.link(links[i]).idle_rate * beta_row[links[i]];
    std::vector<double> row(ne + 1, 0.0);
    row[i] = f.state_size;
    row[tau_var] = -rate;
    lp.a.push_back(std::move(row));
    lp.b.push_back(0.0);
    std::vector<double> cap(ne + 1, 0.0);
    cap[i] = 1.0;
    lp.a.push_back(std::move(cap));
    lp.b.push_back(1.0);
  }

  // load flow conservation on the support subgraph
  for (int n : nodes) {
    std::vector<double> row(ne + 1, 0.0);
    for (std::size_t i = 0; i < ne; ++i) {
      auto [sb, db] = net.incidence(links[i], n);
      row[i] = static_cast<double>(db - sb);
    }
    double rhs = 0.0;
    if (n == destination) rhs = 1.0;
    if (n == f.failure_node) rhs = -1.0;
    lp.a.push_back(row);
    lp.b.push_back(rhs);
    for (double& v : row) v = -v;
    lp.a.push_back(std::move(row));
    lp.b.push_back(-rhs);
  }

  lp_options lo;
  lo.max_nonzeros = opts.lp_budget;
  auto sol = lp_solve(lp, lo);
  if (sol.status != lp_status::optimal)
    throw infeasible_error("agent " + std::to_string(f.id) +
                           ": load split program infeasible");

  agent_split out;
  out.alpha.assign(net.num_links(), 0.0);
  for (std::size_t i = 0; i < ne; ++i) out.alpha[links[i]] = sol.x[i];
  out.tau = sol.x[tau_var];
  return out;
}

std::pair<double, double> follower_cost(const std::vector<agent>& agents,
                                        const std::vector<double>& tau) {
  if (agents.size() != tau.size())
    throw invalid_parameter("follower_cost size mismatch");
  double weighted = 0.0, plain = 0.0;
  for (std::size_t f = 0; f < agents.size(); ++f) {
    weighted += agents[f].unit_forward_cost * agents[f].in_rate * tau[f];
    plain += tau[f];
  }
  return {weighted, plain};
}

follower_oracle_result brute_force_follower(
    const std::vector<agent>& agents, const std::vector<int>& destinations,
    const network& net, const std::vector<double>& link_queue_cost,
    const cost_weights& w, double grid_step, double budget) {
  const std::size_t nf = agents.size();
  if (nf == 0 || nf > 2)
    throw invalid_parameter("grid oracle handles 1 or 2 agents");
  if (grid_step <= 0.0 || grid_step > 0.5)
    throw invalid_parameter("grid_step must lie in (0, 0.5]");

  // per-link share budget in B^v fraction units (congestion guard applied)
  std::vector<double> cap(net.num_links(), 0.0);
  for (int e = 0; e < net.num_links(); ++e) {
    double bv = net.link(e).idle_rate;
    if (bv > kTol) cap[e] = adjusted_idle_rate(net.link(e)) / bv;
  }

  // a link can carry an agent's load iff it sits on some S->D walk through
  // positive adjusted capacity
  auto support_of = [&](int s, int d) {
    std::vector<char> from_s(net.num_nodes(), 0), to_d(net.num_nodes(), 0);
    std::vector<int> stack{s};
    from_s[s] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int e : net.out_links(u))
        if (cap[e] > kTol && !from_s[net.link(e).dst]) {
          from_s[net.link(e).dst] = 1;
          stack.push_back(net.link(e).dst);
        }
    }
    stack = {d};
    to_d[d] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int e : net.in_links(u))
        if (cap[e] > kTol && !to_d[net.link(e).src]) {
          to_d[net.link(e).src] = 1;
          stack.push_back(net.link(e).src);
        }
    }
    std::vector<char> sup(net.num_links(), 0);
    for (int e = 0; e < net.num_links(); ++e)
      if (cap[e] > kTol && from_s[net.link(e).src] && to_d[net.link(e).dst])
        sup[e] = 1;
    return sup;
  };

  std::vector<std::vector<char>> support;
  for (std::size_t f = 0; f < nf; ++f)
    support.push_back(
        support_of(agents[f].failure_node, destinations[f]));

  std::vector<int> contested;
  for (int e = 0; e < net.num_links(); ++e) {
    bool a = support[0][e];
    bool b = nf == 2 && support[1][e];
    if (a && b) contested.push_back(e);
  }

  const int steps = static_cast<int>(std::lround(1.0 / grid_step));
  double points = 1.0;
  for (std::size_t i = 0; i < contested.size(); ++i) {
    points *= steps + 1;
    if (points > budget)
      throw oracle_too_large_error("follower grid oracle budget exceeded");
  }

  follower_oracle_result best;
  best.forwarding_cost = std::numeric_limits<double>::infinity();
  best.total_cost = std::numeric_limits<double>::infinity();
  bool any = false;

  std::vector<std::vector<double>> beta(nf,
                                        std::vector<double>(net.num_links()));
  auto evaluate = [&]() {
    std::vector<double> tau(nf);
    for (std::size_t f = 0; f < nf; ++f) {
      std::vector<double> rates(net.num_links(), 0.0);
      for (int e = 0; e < net.num_links(); ++e)
        rates[e] = net.link(e).idle_rate * beta[f][e];
      double mf = net.max_flow(agents[f].failure_node, destinations[f], rates);
      if (mf <= kTol) return;
      tau[f] = agents[f].state_size / mf;
    }
    any = true;
    double fwd = follower_cost(agents, tau).first;
    double cong = 0.0;
    for (int e = 0; e < net.num_links(); ++e) {
      double cb = link_queue_cost[e];
      if (cb <= 0.0) continue;
      double share = 0.0;
      for (std::size_t f = 0; f < nf; ++f) share += beta[f][e];
      cong += cb * net.link(e).nominal_rate /
              (net.link(e).idle_rate * (1.0 - share));
    }
    double total = w.forwarding * fwd + w.congestion * cong;
    if (fwd < best.forwarding_cost) {
      best.forwarding_cost = fwd;
      best.tau = tau;
      best.beta = beta;
    }
    best.total_cost = std::min(best.total_cost, total);
  };

  // uncontested support links take the full share budget
  for (std::size_t f = 0; f < nf; ++f)
    for (int e = 0; e < net.num_links(); ++e) {
      bool mine = support[f][e];
      bool theirs = nf == 2 && support[1 - f][e];
      beta[f][e] = (mine && !theirs) ? cap[e] : 0.0;
    }

  auto sweep = [&](auto&& self, std::size_t i) -> void {
    if (i == contested.size()) {
      evaluate();
      return;
    }
    int e = contested[i];
    for (int g = 0; g <= steps; ++g) {
      double share = static_cast<double>(g) / steps;
      beta[0][e] = share * cap[e];
      beta[1][e] = (1.0 - share) * cap[e];
      self(self, i + 1);
    }
    beta[0][e] = beta[1][e] = 0.0;
  };
  sweep(sweep, 0);

  if (!any)
    throw infeasible_error("grid oracle: no feasible allocation on the grid");
  return best;
}

}  // namespace migplan
