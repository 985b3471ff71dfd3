#include "migplan/leader.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "migplan/rng.hpp"

namespace migplan {

namespace {
constexpr double kTol = 1e-9;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> normalized(std::vector<double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  if (s > 0.0)
    for (double& x : v) x /= s;
  return v;
}
}  // namespace

double capacity_cache::chi(int s, int t) { return row(s).at(t); }

double capacity_cache::best_chi(int s) {
  const auto& r = row(s);
  double best = 0.0;
  for (int t = 0; t < net_->num_nodes(); ++t)
    if (t != s) best = std::max(best, r[t]);
  return best;
}

const std::vector<double>& capacity_cache::row(int s) {
  auto it = rows_.find(s);
  if (it != rows_.end()) return it->second;
  std::vector<double> r(net_->num_nodes(), 0.0);
  for (int t = 0; t < net_->num_nodes(); ++t)
    if (t != s) r[t] = net_->multipath_capacity(s, t);
  return rows_.emplace(s, std::move(r)).first->second;
}

residual_state residual_state::make(const network& net) {
  residual_state res;
  res.compute_left.resize(net.num_nodes());
  for (int n = 0; n < net.num_nodes(); ++n)
    res.compute_left[n] = net.node(n).idle_compute;
  res.link_left.resize(net.num_links());
  for (int e = 0; e < net.num_links(); ++e)
    res.link_left[e] = net.link(e).idle_rate;
  res.used.assign(net.num_nodes(), 0);
  return res;
}

std::optional<path> find_chain_path(const network& net,
                                    const residual_state& res, int src,
                                    int dst, double demand, int max_hops) {
  if (src == dst) {
    path p;
    p.nodes.push_back(src);
    return p;
  }
  std::vector<int> parent_link(net.num_nodes(), -1);
  std::vector<int> dist(net.num_nodes(), -1);
  std::queue<int> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    if (u == dst) break;
    if (dist[u] >= max_hops) continue;
    for (int e : net.out_links(u)) {
      if (res.link_left[e] < demand - kTol) continue;
      int v = net.link(e).dst;
      if (dist[v] >= 0) continue;
      dist[v] = dist[u] + 1;
      parent_link[v] = e;
      q.push(v);
    }
  }
  if (dist[dst] < 0 || dist[dst] > max_hops) return std::nullopt;
  path p;
  for (int v = dst; v != src;) {
    int e = parent_link[v];
    p.links.push_back(e);
    p.nodes.push_back(v);
    v = net.link(e).src;
  }
  p.nodes.push_back(src);
  std::reverse(p.nodes.begin(), p.nodes.end());
  std::reverse(p.links.begin(), p.links.end());
  return p;
}

std::optional<commit_record> commit_agent(const network& net,
                                          residual_state& res, const agent& f,
                                          int n, int max_hops) {
  if (n == f.failure_node) return std::nullopt;
  if (res.compute_left[n] < f.compute_demand - kTol) return std::nullopt;
  auto rm = find_chain_path(net, res, f.prev_hop, n, f.in_rate, max_hops);
  if (!rm) return std::nullopt;
  for (int e : rm->links) res.link_left[e] -= f.in_rate;
  auto rp = find_chain_path(net, res, n, f.next_hop, f.out_rate, max_hops);
  if (!rp) {
    for (int e : rm->links) res.link_left[e] += f.in_rate;
    return std::nullopt;
  }
  for (int e : rp->links) res.link_left[e] -= f.out_rate;
  res.compute_left[n] -= f.compute_demand;
  commit_record rec;
  rec.node = n;
  rec.was_used = res.used[n];
  rec.rho_minus = *rm;
  rec.rho_plus = *rp;
  res.used[n] = 1;
  return rec;
}

void undo_commit(const network& net, residual_state& res, const agent& f,
                 const commit_record& rec) {
  (void)net;
  res.compute_left[rec.node] += f.compute_demand;
  for (int e : rec.rho_minus.links) res.link_left[e] += f.in_rate;
  for (int e : rec.rho_plus.links) res.link_left[e] += f.out_rate;
  res.used[rec.node] = rec.was_used ? 1 : 0;
}

namespace {
// Hop distances over links whose residual supports `demand`; reverse=true
// walks links backwards (distances *to* src).
std::vector<int> filtered_distances(const network& net,
                                    const residual_state& res, int src,
                                    double demand, bool reverse) {
  std::vector<int> dist(net.num_nodes(), -1);
  std::queue<int> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    const auto& adj = reverse ? net.in_links(u) : net.out_links(u);
    for (int e : adj) {
      if (res.link_left[e] < demand - kTol) continue;
      int v = reverse ? net.link(e).src : net.link(e).dst;
      if (dist[v] >= 0) continue;
      dist[v] = dist[u] + 1;
      q.push(v);
    }
  }
  return dist;
}
}  // namespace

std::vector<int> candidate_set_nothrow(const network& net,
                                       const residual_state& res,
                                       const agent& f, int max_hops) {
  auto from_prev =
      filtered_distances(net, res, f.prev_hop, f.in_rate, false);
  auto to_next = filtered_distances(net, res, f.next_hop, f.out_rate, true);
  std::vector<int> cands;
  for (int n = 0; n < net.num_nodes(); ++n) {
    if (n == f.failure_node) continue;
    if (res.compute_left[n] < f.compute_demand - kTol) continue;
    if (from_prev[n] < 0 || from_prev[n] > max_hops) continue;
    if (to_next[n] < 0 || to_next[n] > max_hops) continue;
    cands.push_back(n);
  }
  return cands;
}

std::vector<int> candidate_set(const network& net, const residual_state& res,
                               const agent& f, int max_hops) {
  auto cands = candidate_set_nothrow(net, res, f, max_hops);
  if (cands.empty())
    throw no_candidate_error("agent " + std::to_string(f.id) +
                             " has no feasible destination");
  return cands;
}

double migration_priority(const agent& f) {
  return f.in_rate * f.state_size / f.tat;
}

std::vector<std::size_t> priority_tour(const std::vector<agent>& agents,
                                       const network& net) {
  if (agents.empty()) throw invalid_parameter("priority_tour needs agents");
  const std::size_t nf = agents.size();

  // symmetrized hop distance between failure points
  std::map<int, std::vector<int>> dist_from;
  for (const auto& f : agents)
    if (!dist_from.count(f.failure_node))
      dist_from[f.failure_node] = net.hop_distances(f.failure_node);
  auto hop = [&](int a, int b) {
    int ab = dist_from[a][b], ba = dist_from[b][a];
    int big = net.num_nodes() + 1;
    if (ab < 0) ab = big;
    if (ba < 0) ba = big;
    return std::min(ab, ba);
  };

  std::vector<char> visited(nf, 0);
  std::vector<std::size_t> tour;

  std::size_t first = 0;
  for (std::size_t i = 1; i < nf; ++i)
    if (migration_priority(agents[i]) > migration_priority(agents[first]) + kTol)
      first = i;
  visited[first] = 1;
  tour.push_back(first);

  while (tour.size() < nf) {
    std::size_t prev = tour.back();
    std::size_t best = nf;
    for (std::size_t i = 0; i < nf; ++i) {
      if (visited[i]) continue;
      if (best == nf) {
        best = i;
        continue;
      }
      int di = hop(agents[prev].failure_node, agents[i].failure_node);
      int db = hop(agents[prev].failure_node, agents[best].failure_node);
      if (di < db) {
        best = i;
      } else if (di == db) {
        double pi = migration_priority(agents[i]);
        double pb = migration_priority(agents[best]);
        if (pi > pb + kTol) best = i;  // then agent id (= index order)
      }
    }
    visited[best] = 1;
    tour.push_back(best);
  }
  return tour;
}

leader_utilities_result leader_utilities(const std::vector<int>& destinations,
                                         const scenario& sc,
                                         capacity_cache& cache) {
  const network& net = sc.net;
  if (destinations.size() != sc.agents.size())
    throw invalid_parameter("destination vector size mismatch");
  leader_utilities_result r;
  r.used.assign(net.num_nodes(), 0);
  for (int d : destinations) {
    if (d < 0 || d >= net.num_nodes())
      throw invalid_reference("destination outside node set");
    r.used[d] = 1;
  }

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    num += cache.chi(sc.agents[i].failure_node, destinations[i]);
    den += cache.best_chi(sc.agents[i].failure_node);
  }
  if (den <= kTol)
    throw no_candidate_error("no agent can reach any destination (chi == 0)");
  r.u_n = num / den;

  double used_rc = 0.0, all_rc = 0.0;
  for (int n = 0; n < net.num_nodes(); ++n) {
    all_rc += net.node(n).idle_compute;
    if (r.used[n]) used_rc += net.node(n).idle_compute;
  }
  r.u_l = all_rc > kTol ? used_rc / all_rc : 0.0;

  int n_idle = 0, spared = 0;
  for (int n = 0; n < net.num_nodes(); ++n) {
    if (!net.node(n).idle) continue;
    ++n_idle;
    if (!r.used[n]) ++spared;
  }
  // no idle server means none can be wasted
  r.u_p = n_idle == 0 ? 1.0 : static_cast<double>(spared) / n_idle;

  r.total = sc.w_n * r.u_n + sc.w_l * r.u_l + sc.w_p * r.u_p;
  return r;
}

double emission_utility(const scenario& sc, capacity_cache& cache,
                        const residual_state& res, const agent& f, int n) {
  double vt = f.state_size / f.tat;
  return sc.w_b * cache.chi(f.failure_node, n) / vt +
         sc.w_c * res.compute_left[n] / f.compute_demand +
         sc.w_i * (res.used[n] ? 0.0 : 1.0);
}

std::vector<double> destination_distribution(const scenario& sc,
                                             capacity_cache& cache,
                                             const residual_state& res,
                                             const agent& f) {
  auto cands = candidate_set(sc.net, res, f, sc.max_hops);
  std::vector<double> q(sc.net.num_nodes(), 0.0);
  for (int n : cands) q[n] = emission_utility(sc, cache, res, f, n);
  return normalized(std::move(q));
}

std::vector<double> initial_probs(const scenario& sc, capacity_cache& cache,
                                  const std::vector<agent>& all_vnfs) {
  if (all_vnfs.empty()) throw invalid_parameter("initial_probs needs VNFs");
  residual_state pristine = residual_state::make(sc.net);
  std::vector<double> init(sc.net.num_nodes(), 0.0);
  for (const auto& u : all_vnfs) {
    auto cond = destination_distribution(sc, cache, pristine, u);
    for (int n = 0; n < sc.net.num_nodes(); ++n)
      init[n] += cond[n] / static_cast<double>(all_vnfs.size());
  }
  return init;
}

namespace {
// normalize q(n)*init(n); fall back to q when the product vanishes
std::vector<double> bayes_column(const std::vector<double>& q,
                                 const std::vector<double>& init) {
  std::vector<double> e(q.size());
  double s = 0.0;
  for (std::size_t n = 0; n < q.size(); ++n) {
    e[n] = q[n] * init[n];
    s += e[n];
  }
  if (s <= 0.0) return q;
  for (double& x : e) x /= s;
  return e;
}
}  // namespace

hmm_model build_hmm(const scenario& sc, capacity_cache& cache,
                    const std::vector<std::size_t>& tour) {
  const network& net = sc.net;
  hmm_model model;
  model.num_states = net.num_nodes();
  model.initial = initial_probs(sc, cache, sc.agents);

  residual_state res = residual_state::make(net);

  std::vector<std::vector<double>> q_cols;  // pre-Bayes columns
  for (std::size_t k = 0; k < tour.size(); ++k) {
    auto q = destination_distribution(sc, cache, res, sc.agents[tour[k]]);
    model.emission.push_back(bayes_column(q, model.initial));
    q_cols.push_back(std::move(q));
  }

  // step-k transition rows: pool debited only by the step-k commitment at m
  for (std::size_t k = 0; k + 1 < tour.size(); ++k) {
    const agent& cur = sc.agents[tour[k]];
    const agent& nxt = sc.agents[tour[k + 1]];
    std::vector<std::vector<double>> step(
        net.num_nodes(), std::vector<double>(net.num_nodes(), 0.0));
    for (int m = 0; m < net.num_nodes(); ++m) {
      if (q_cols[k][m] <= 0.0) continue;  // m is not a candidate for obs k
      auto rec = commit_agent(net, res, cur, m, sc.max_hops);
      if (!rec) continue;
      auto cands = candidate_set_nothrow(net, res, nxt, sc.max_hops);
      if (!cands.empty()) {
        std::vector<double> q(net.num_nodes(), 0.0);
        for (int n : cands) q[n] = emission_utility(sc, cache, res, nxt, n);
        step[m] = bayes_column(normalized(std::move(q)), model.initial);
      }
      undo_commit(net, res, cur, *rec);
    }
    model.transition.push_back(std::move(step));
  }
  return model;
}

viterbi_path viterbi_decode(const hmm_model& model) {
  const std::size_t steps = model.emission.size();
  if (steps == 0) throw invalid_parameter("empty observation sequence");
  const int ns = model.num_states;

  auto lg = [](double p) { return p > 0.0 ? std::log(p) : kNegInf; };

  std::vector<std::vector<double>> dp(steps, std::vector<double>(ns, kNegInf));
  std::vector<std::vector<int>> back(steps, std::vector<int>(ns, -1));
  for (int n = 0; n < ns; ++n)
    dp[0][n] = lg(model.initial[n]) + lg(model.emission[0][n]);

  for (std::size_t k = 1; k < steps; ++k) {
    for (int n = 0; n < ns; ++n) {
      double emis = lg(model.emission[k][n]);
      if (emis == kNegInf) continue;
      for (int m = 0; m < ns; ++m) {
        if (dp[k - 1][m] == kNegInf) continue;
        double cand = dp[k - 1][m] + lg(model.transition[k - 1][m][n]) + emis;
        if (cand > dp[k][n]) {  // ties keep the lower previous state
          dp[k][n] = cand;
          back[k][n] = m;
        }
      }
    }
  }

  int best = -1;
  for (int n = 0; n < ns; ++n)
    if (dp[steps - 1][n] > (best < 0 ? kNegInf : dp[steps - 1][best]))
      best = n;
  if (best < 0 || dp[steps - 1][best] == kNegInf)
    throw infeasible_error("viterbi: every state sequence has probability 0");

  viterbi_path vp;
  vp.log_prob = dp[steps - 1][best];
  vp.states.assign(steps, -1);
  for (std::size_t k = steps; k-- > 0;) {
    vp.states[k] = best;
    best = back[k][best];
  }
  return vp;
}

namespace {
leader_result finalize(const scenario& sc, capacity_cache& cache,
                       const std::vector<std::size_t>& tour,
                       const std::vector<int>& dest_by_step) {
  const network& net = sc.net;
  leader_result out;
  out.destinations.assign(sc.agents.size(), -1);
  out.rho_minus.resize(sc.agents.size());
  out.rho_plus.resize(sc.agents.size());

  residual_state res = residual_state::make(net);
  for (std::size_t k = 0; k < tour.size(); ++k) {
    const agent& f = sc.agents[tour[k]];
    auto rec = commit_agent(net, res, f, dest_by_step[k], sc.max_hops);
    if (!rec)
      throw infeasible_error("leader solution failed residual commitment");
    out.destinations[tour[k]] = dest_by_step[k];
    out.rho_minus[tour[k]] = rec->rho_minus;
    out.rho_plus[tour[k]] = rec->rho_plus;
  }
  auto u = leader_utilities(out.destinations, sc, cache);
  out.used = u.used;
  out.u_n = u.u_n;
  out.u_l = u.u_l;
  out.u_p = u.u_p;
  out.total = u.total;
  return out;
}

// candidates ordered by raw utility (desc), then node id
std::vector<int> ranked_candidates(const scenario& sc, capacity_cache& cache,
                                   const residual_state& res, const agent& f) {
  auto cands = candidate_set_nothrow(sc.net, res, f, sc.max_hops);
  std::stable_sort(cands.begin(), cands.end(), [&](int a, int b) {
    double ua = emission_utility(sc, cache, res, f, a);
    double ub = emission_utility(sc, cache, res, f, b);
    if (std::fabs(ua - ub) > kTol) return ua > ub;
    return a < b;
  });
  return cands;
}
}  // namespace

leader_result viterbi_leader(const scenario& sc, capacity_cache& cache) {
  auto tour = priority_tour(sc.agents, sc.net);
  auto model = build_hmm(sc, cache, tour);
  auto decoded = viterbi_decode(model);

  // sequential re-commitment; the per-step transition pool only sees the
  // previous state, so later steps may need a greedy repair
  const network& net = sc.net;
  residual_state res = residual_state::make(net);
  std::vector<int> dest_by_step(tour.size(), -1);
  std::vector<commit_record> recs(tour.size());
  for (std::size_t k = 0; k < tour.size(); ++k) {
    const agent& f = sc.agents[tour[k]];
    int pick = decoded.states[k];
    auto rec = commit_agent(net, res, f, pick, sc.max_hops);
    if (!rec) {
      pick = -1;
      for (int n : ranked_candidates(sc, cache, res, f)) {
        if ((rec = commit_agent(net, res, f, n, sc.max_hops))) {
          pick = n;
          break;
        }
      }
      if (pick < 0)
        throw no_candidate_error("viterbi repair: agent " +
                                 std::to_string(f.id) + " unplaceable");
    }
    dest_by_step[k] = pick;
    recs[k] = *rec;
  }

  // one polish sweep: re-seat each agent wherever the joint utility strictly
  // improves (the decode maximizes a product of normalized scores, which can
  // drift from the utility sum it stands in for)
  auto dests_of = [&] {
    std::vector<int> d(sc.agents.size());
    for (std::size_t k = 0; k < tour.size(); ++k) d[tour[k]] = dest_by_step[k];
    return d;
  };
  for (std::size_t k = 0; k < tour.size(); ++k) {
    const agent& f = sc.agents[tour[k]];
    double best_total = leader_utilities(dests_of(), sc, cache).total;
    undo_commit(net, res, f, recs[k]);
    int best = dest_by_step[k];
    for (int n : candidate_set_nothrow(net, res, f, sc.max_hops)) {
      if (n == dest_by_step[k]) continue;
      auto trial = commit_agent(net, res, f, n, sc.max_hops);
      if (!trial) continue;
      dest_by_step[k] = n;
      double total = leader_utilities(dests_of(), sc, cache).total;
      undo_commit(net, res, f, *trial);
      dest_by_step[k] = recs[k].node;
      if (total > best_total + 1e-12) {
        best_total = total;
        best = n;
      }
    }
    auto rec = commit_agent(net, res, f, best, sc.max_hops);
    if (!rec) rec = commit_agent(net, res, f, recs[k].node, sc.max_hops);
    if (!rec)
      throw infeasible_error("leader polish failed to re-commit an agent");
    dest_by_step[k] = rec->node;
    recs[k] = *rec;
  }
  return finalize(sc, cache, tour, dest_by_step);
}

leader_result exhaustive_leader(const scenario& sc, capacity_cache& cache,
                                double budget) {
  const network& net = sc.net;
  auto tour = priority_tour(sc.agents, sc.net);

  residual_state pristine = residual_state::make(net);
  double combos = 1.0;
  for (const auto& f : sc.agents) {
    combos *= static_cast<double>(
        std::max<std::size_t>(1, candidate_set_nothrow(net, pristine, f,
                                                       sc.max_hops).size()));
    if (combos > budget)
      throw oracle_too_large_error("exhaustive leader budget exceeded");
  }

  residual_state res = residual_state::make(net);
  std::vector<int> dest_by_step(tour.size(), -1);
  std::vector<int> best_by_step;
  std::vector<int> best_dest;
  double best_total = kNegInf;

  auto dfs = [&](auto&& self, std::size_t k) -> void {
    if (k == tour.size()) {
      std::vector<int> dest(sc.agents.size());
      for (std::size_t i = 0; i < tour.size(); ++i)
        dest[tour[i]] = dest_by_step[i];
      double total = leader_utilities(dest, sc, cache).total;
      if (total > best_total + 1e-12 ||
          (total > best_total - 1e-12 &&
           (best_dest.empty() || dest < best_dest))) {
        best_total = total;
        best_dest = dest;
        best_by_step = dest_by_step;
      }
      return;
    }
    const agent& f = sc.agents[tour[k]];
    for (int n = 0; n < net.num_nodes(); ++n) {
      auto rec = commit_agent(net, res, f, n, sc.max_hops);
      if (!rec) continue;
      dest_by_step[k] = n;
      self(self, k + 1);
      undo_commit(net, res, f, *rec);
    }
  };
  dfs(dfs, 0);

  if (best_dest.empty())
    throw no_candidate_error("exhaustive leader: no feasible joint assignment");
  return finalize(sc, cache, tour, best_by_step);
}

leader_result greedy_sort_leader(const scenario& sc, capacity_cache& cache) {
  const network& net = sc.net;
  auto tour = priority_tour(sc.agents, sc.net);
  residual_state res = residual_state::make(net);
  std::vector<int> dest_by_step(tour.size(), -1);
  for (std::size_t k = 0; k < tour.size(); ++k) {
    const agent& f = sc.agents[tour[k]];
    for (int n : ranked_candidates(sc, cache, res, f)) {
      if (auto rec = commit_agent(net, res, f, n, sc.max_hops)) {
        dest_by_step[k] = n;
        break;
      }
    }
    if (dest_by_step[k] < 0)
      throw no_candidate_error("greedy leader: agent " + std::to_string(f.id) +
                               " unplaceable");
  }
  return finalize(sc, cache, tour, dest_by_step);
}

leader_result random_leader(const scenario& sc, capacity_cache& cache,
                            std::uint64_t seed) {
  const network& net = sc.net;
  auto tour = priority_tour(sc.agents, sc.net);
  rng r(seed);
  residual_state res = residual_state::make(net);
  std::vector<int> dest_by_step(tour.size(), -1);
  for (std::size_t k = 0; k < tour.size(); ++k) {
    const agent& f = sc.agents[tour[k]];
    auto cands = candidate_set_nothrow(net, res, f, sc.max_hops);
    while (!cands.empty()) {
      std::size_t i = r.index(cands.size());
      if (auto rec = commit_agent(net, res, f, cands[i], sc.max_hops)) {
        dest_by_step[k] = cands[i];
        break;
      }
      cands.erase(cands.begin() + static_cast<std::ptrdiff_t>(i));
    }
    if (dest_by_step[k] < 0)
      throw no_candidate_error("random leader: agent " + std::to_string(f.id) +
                               " unplaceable");
  }
  return finalize(sc, cache, tour, dest_by_step);
}

}  // namespace migplan
