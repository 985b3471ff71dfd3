#include "migplan/scenario.hpp"

#include <cmath>
#include <fstream>

#include "migplan/rng.hpp"

namespace migplan {

namespace {
constexpr double kEps = 1e-9;

void check_weight_sum(double a, double b, double c, const char* what) {
  if (a < -kEps || b < -kEps || c < -kEps || std::fabs(a + b + c - 1.0) > kEps)
    throw invalid_parameter(std::string(what) + " weights must be nonnegative and sum to 1");
}
}  // namespace

void scenario::validate() const {
  if (w_forwarding < -kEps || w_congestion < -kEps ||
      std::fabs(w_forwarding + w_congestion - 1.0) > kEps)
    throw invalid_parameter("cost weights must be nonnegative and sum to 1");
  check_weight_sum(w_n, w_l, w_p, "leader");
  check_weight_sum(w_b, w_c, w_i, "emission");
  if (link_queue_cost.size() != static_cast<std::size_t>(net.num_links()))
    throw invalid_parameter("link_queue_cost size mismatch");
  for (double c : link_queue_cost)
    if (c < 0.0) throw invalid_parameter("link queue cost must be >= 0");
  if (max_hops < 1) throw invalid_parameter("max_hops must be >= 1");
  for (const auto& f : agents) {
    if (f.state_size <= 0.0 || f.tat <= 0.0 || f.compute_demand <= 0.0)
      throw invalid_parameter("agent V, T, C_r must be > 0");
    if (f.in_rate < 0.0 || f.out_rate < 0.0 || f.unit_forward_cost < 0.0)
      throw invalid_parameter("agent rates and cost must be >= 0");
    for (int n : {f.failure_node, f.prev_hop, f.next_hop})
      if (n < 0 || n >= net.num_nodes())
        throw invalid_parameter("agent node reference outside network");
  }
}

network gen_trapezoid(int levels, const trapezoid_params& p, std::uint64_t seed) {
  if (levels < 2) throw invalid_parameter("trapezoid needs at least 2 levels");
  if (p.top_width < 2) throw invalid_parameter("trapezoid top width must be >= 2");
  rng r(seed);

  std::vector<int> width(levels);
  for (int l = 0; l < levels; ++l) width[l] = std::max(1, p.top_width - l);

  std::vector<node_rec> nodes;
  std::vector<int> first_of_level(levels);
  for (int l = 0; l < levels; ++l) {
    first_of_level[l] = static_cast<int>(nodes.size());
    for (int i = 0; i < width[l]; ++i)
      nodes.push_back({p.node_compute, false});
  }
  for (auto& nd : nodes) nd.idle = r.bernoulli(p.p_idle);

  std::vector<link_rec> links;
  for (int l = 0; l + 1 < levels; ++l)
    for (int i = 0; i < width[l]; ++i)
      for (int j = 0; j < width[l + 1]; ++j)
        links.push_back({first_of_level[l] + i, first_of_level[l + 1] + j,
                         p.nominal_rate, p.idle_rate});
  return network(std::move(nodes), std::move(links));
}

network gen_grid_random(int rows, int cols, double link_prob,
                        const grid_params& p, std::uint64_t seed) {
  if (rows * cols < 2) throw invalid_parameter("grid needs at least 2 nodes");
  if (link_prob < 0.0 || link_prob > 1.0)
    throw invalid_parameter("link_prob must lie in [0, 1]");
  rng r(seed);
  int n = rows * cols;
  std::vector<node_rec> nodes(n);
  for (auto& nd : nodes) {
    nd.idle_compute = p.node_compute;
    nd.idle = r.bernoulli(p.p_idle);
  }
  std::vector<link_rec> links;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      if (r.bernoulli(link_prob))
        links.push_back({u, v, p.nominal_rate, p.idle_rate});
    }
  return network(std::move(nodes), std::move(links));
}

network gen_three_tier(int pods, const three_tier_params& p, std::uint64_t seed) {
  if (pods < 1) throw invalid_parameter("three-tier needs at least 1 pod");
  rng r(seed);
  std::vector<node_rec> nodes;
  std::vector<link_rec> links;

  auto add_node = [&]() {
    nodes.push_back({p.node_compute, false});
    return static_cast<int>(nodes.size()) - 1;
  };
  auto add_duplex = [&](int a, int b) {
    links.push_back({a, b, p.nominal_rate, p.idle_rate});
    links.push_back({b, a, p.nominal_rate, p.idle_rate});
  };

  std::vector<int> core(pods);
  for (int c = 0; c < pods; ++c) core[c] = add_node();
  for (int pod = 0; pod < pods; ++pod) {
    std::vector<int> agg(p.agg_per_pod);
    for (int a = 0; a < p.agg_per_pod; ++a) {
      agg[a] = add_node();
      for (int c : core) add_duplex(c, agg[a]);
    }
    for (int e = 0; e < p.edge_per_pod; ++e) {
      int edge = add_node();
      for (int a : agg) add_duplex(a, edge);
    }
  }
  for (auto& nd : nodes) nd.idle = r.bernoulli(p.p_idle);
  return network(std::move(nodes), std::move(links));
}

network sample_node_loads(const network& net, double c_r_max, std::uint64_t seed) {
  if (c_r_max <= 0.0) throw invalid_parameter("c_r_max must be > 0");
  rng r(seed);
  std::vector<node_rec> nodes = net.nodes();
  for (auto& nd : nodes) nd.idle_compute = r.uniform(c_r_max / 2.0, c_r_max);
  return network(std::move(nodes), net.links());
}

std::vector<agent> make_agent_pool(const network& net,
                                   const agent_pool_params& p,
                                   std::uint64_t seed) {
  rng r(seed);
  std::vector<agent> pool;

  // nodes with no incoming link act as entry points of layered topologies
  std::vector<int> sources;
  for (int n = 0; n < net.num_nodes(); ++n)
    if (net.in_links(n).empty()) sources.push_back(n);

  for (int s = 0; s < net.num_nodes(); ++s) {
    if (net.node(s).idle) continue;
    agent f;
    f.id = static_cast<int>(pool.size());
    f.failure_node = s;
    f.state_size = r.uniform(p.v_lo, p.v_hi);
    f.tat = r.uniform(p.t_lo, p.t_hi);
    f.compute_demand = r.uniform(p.c_lo, p.c_hi);
    f.in_rate = r.uniform(p.r_lo, p.r_hi);
    f.out_rate = r.uniform(p.r_lo, p.r_hi);
    f.unit_forward_cost = p.unit_forward_cost;

    // prev hop: in-neighbor of S, else a fellow source, else any other node
    std::vector<int> prev_cands;
    for (int e : net.in_links(s)) prev_cands.push_back(net.link(e).src);
    if (prev_cands.empty())
      for (int n : sources)
        if (n != s) prev_cands.push_back(n);
    if (prev_cands.empty())
      for (int n = 0; n < net.num_nodes(); ++n)
        if (n != s) prev_cands.push_back(n);
    f.prev_hop = prev_cands[r.index(prev_cands.size())];

    // next hop: a node at hop distance >= 2 so an intermediate destination
    // can exist, else a direct out-neighbor, else any other node
    std::vector<int> next_cands;
    auto dist = net.hop_distances(s);
    for (int n = 0; n < net.num_nodes(); ++n)
      if (dist[n] >= 2) next_cands.push_back(n);
    if (next_cands.empty())
      for (int e : net.out_links(s)) next_cands.push_back(net.link(e).dst);
    if (next_cands.empty())
      for (int n = 0; n < net.num_nodes(); ++n)
        if (n != s) next_cands.push_back(n);
    f.next_hop = next_cands[r.index(next_cands.size())];

    pool.push_back(f);
  }
  return pool;
}

std::vector<agent> inject_failures(const std::vector<agent>& pool,
                                   double fraction, std::uint64_t seed) {
  if (pool.empty()) throw invalid_parameter("agent pool is empty");
  if (fraction <= 0.0 || fraction > 1.0)
    throw invalid_parameter("failure fraction must lie in (0, 1]");
  std::size_t k = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(pool.size())));
  k = std::min(k, pool.size());
  rng r(seed);
  auto idx = r.sample_without_replacement(pool.size(), k);
  std::vector<agent> out;
  out.reserve(k);
  for (std::size_t i : idx) out.push_back(pool[i]);
  return out;
}

nlohmann::json network_to_json(const network& net) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (int n = 0; n < net.num_nodes(); ++n) {
    const auto& nd = net.node(n);
    j["nodes"].push_back({{"id", n},
                          {"idle_compute", nd.idle_compute},
                          {"idle", nd.idle}});
  }
  j["links"] = nlohmann::json::array();
  for (int e = 0; e < net.num_links(); ++e) {
    const auto& lk = net.link(e);
    j["links"].push_back({{"src", lk.src},
                          {"dst", lk.dst},
                          {"nominal_rate", lk.nominal_rate},
                          {"idle_rate", lk.idle_rate}});
  }
  return j;
}

network network_from_json(const nlohmann::json& j) {
  std::vector<node_rec> nodes(j.at("nodes").size());
  for (const auto& nj : j.at("nodes")) {
    int id = nj.at("id").get<int>();
    if (id < 0 || static_cast<std::size_t>(id) >= nodes.size())
      throw invalid_parameter("node id out of range in document");
    nodes[id] = {nj.at("idle_compute").get<double>(), nj.at("idle").get<bool>()};
  }
  std::vector<link_rec> links;
  for (const auto& lj : j.at("links"))
    links.push_back({lj.at("src").get<int>(), lj.at("dst").get<int>(),
                     lj.at("nominal_rate").get<double>(),
                     lj.at("idle_rate").get<double>()});
  return network(std::move(nodes), std::move(links));
}

nlohmann::json scenario_to_json(const scenario& sc) {
  nlohmann::json j;
  j["name"] = sc.name;
  j["network"] = network_to_json(sc.net);
  j["agents"] = nlohmann::json::array();
  for (const auto& f : sc.agents)
    j["agents"].push_back({{"id", f.id},
                           {"state_size", f.state_size},
                           {"tat", f.tat},
                           {"compute_demand", f.compute_demand},
                           {"in_rate", f.in_rate},
                           {"out_rate", f.out_rate},
                           {"failure_node", f.failure_node},
                           {"prev_hop", f.prev_hop},
                           {"next_hop", f.next_hop},
                           {"unit_forward_cost", f.unit_forward_cost}});
  j["weights"] = {{"forwarding", sc.w_forwarding},
                  {"congestion", sc.w_congestion},
                  {"n", sc.w_n},
                  {"l", sc.w_l},
                  {"p", sc.w_p},
                  {"b", sc.w_b},
                  {"c", sc.w_c},
                  {"i", sc.w_i}};
  j["link_queue_cost"] = sc.link_queue_cost;
  j["max_hops"] = sc.max_hops;
  j["seed"] = sc.seed;
  return j;
}

scenario scenario_from_json(const nlohmann::json& j) {
  scenario sc;
  sc.name = j.value("name", "");
  sc.net = network_from_json(j.at("network"));
  for (const auto& aj : j.at("agents")) {
    agent f;
    f.id = aj.at("id").get<int>();
    f.state_size = aj.at("state_size").get<double>();
    f.tat = aj.at("tat").get<double>();
    f.compute_demand = aj.at("compute_demand").get<double>();
    f.in_rate = aj.at("in_rate").get<double>();
    f.out_rate = aj.at("out_rate").get<double>();
    f.failure_node = aj.at("failure_node").get<int>();
    f.prev_hop = aj.at("prev_hop").get<int>();
    f.next_hop = aj.at("next_hop").get<int>();
    f.unit_forward_cost = aj.at("unit_forward_cost").get<double>();
    sc.agents.push_back(f);
  }
  const auto& w = j.at("weights");
  sc.w_forwarding = w.at("forwarding").get<double>();
  sc.w_congestion = w.at("congestion").get<double>();
  sc.w_n = w.at("n").get<double>();
  sc.w_l = w.at("l").get<double>();
  sc.w_p = w.at("p").get<double>();
  sc.w_b = w.at("b").get<double>();
  sc.w_c = w.at("c").get<double>();
  sc.w_i = w.at("i").get<double>();
  sc.link_queue_cost = j.at("link_queue_cost").get<std::vector<double>>();
  sc.max_hops = j.at("max_hops").get<int>();
  sc.seed = j.at("seed").get<std::uint64_t>();
  sc.validate();
  return sc;
}

scenario load_scenario(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw invalid_parameter("cannot open scenario file: " + file);
  nlohmann::json j;
  in >> j;
  return scenario_from_json(j);
}

void save_scenario(const scenario& sc, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw invalid_parameter("cannot write scenario file: " + file);
  out << scenario_to_json(sc).dump(2) << "\n";
}

}  // namespace migplan
