#include "migplan/net.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace migplan {

namespace {
constexpr double kEps = 1e-9;
}

bool path_traverses(int e, const path& p) {
  return std::find(p.links.begin(), p.links.end(), e) != p.links.end();
}

network::network(std::vector<node_rec> nodes, std::vector<link_rec> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  const int n = num_nodes();
  for (const auto& nd : nodes_) {
    if (nd.idle_compute < 0.0)
      throw invalid_parameter("node idle_compute must be >= 0");
  }
  for (const auto& lk : links_) {
    if (lk.src < 0 || lk.src >= n || lk.dst < 0 || lk.dst >= n)
      throw invalid_parameter("link endpoint outside node set");
    if (lk.nominal_rate <= 0.0)
      throw invalid_parameter("link nominal_rate must be > 0");
    if (lk.idle_rate < -kEps || lk.idle_rate > lk.nominal_rate + kEps)
      throw invalid_parameter("link idle_rate must lie in [0, nominal_rate]");
  }
  out_.assign(n, {});
  in_.assign(n, {});
  for (int e = 0; e < num_links(); ++e) {
    out_[links_[e].src].push_back(e);
    in_[links_[e].dst].push_back(e);
  }
  // deterministic adjacency order: by head node, then link id
  for (auto& v : out_)
    std::sort(v.begin(), v.end(), [&](int a, int b) {
      if (links_[a].dst != links_[b].dst) return links_[a].dst < links_[b].dst;
      return a < b;
    });
}

void network::check_node(int n) const {
  if (n < 0 || n >= num_nodes()) throw invalid_reference("unknown node id");
}

void network::check_link(int e) const {
  if (e < 0 || e >= num_links()) throw invalid_reference("unknown link id");
}

const node_rec& network::node(int n) const {
  check_node(n);
  return nodes_[n];
}

const link_rec& network::link(int e) const {
  check_link(e);
  return links_[e];
}

const std::vector<int>& network::out_links(int n) const {
  check_node(n);
  return out_[n];
}

const std::vector<int>& network::in_links(int n) const {
  check_node(n);
  return in_[n];
}

std::pair<int, int> network::incidence(int e, int n) const {
  check_link(e);
  check_node(n);
  const auto& lk = links_[e];
  return {lk.src == n ? 1 : 0, lk.dst == n ? 1 : 0};
}

std::vector<path> network::enumerate_paths(int src, int dst, int max_hops,
                                           std::size_t budget) const {
  check_node(src);
  check_node(dst);
  if (src == dst) throw degenerate_query("enumerate_paths requires src != dst");
  if (max_hops < 1) throw invalid_parameter("max_hops must be >= 1");

  std::vector<path> result;
  std::vector<char> visited(nodes_.size(), 0);
  path cur;
  cur.nodes.push_back(src);
  visited[src] = 1;

  auto dfs = [&](auto&& self, int u) -> void {
    if (u == dst) {
      result.push_back(cur);
      if (result.size() > budget)
        throw oracle_too_large_error("path enumeration exceeded budget");
      return;
    }
    if (cur.hops() >= max_hops) return;
    for (int e : out_[u]) {
      int v = links_[e].dst;
      if (visited[v]) continue;
      visited[v] = 1;
      cur.nodes.push_back(v);
      cur.links.push_back(e);
      self(self, v);
      cur.nodes.pop_back();
      cur.links.pop_back();
      visited[v] = 0;
    }
  };
  dfs(dfs, src);

  std::sort(result.begin(), result.end(), [](const path& a, const path& b) {
    if (a.nodes != b.nodes) return a.nodes < b.nodes;
    return a.links < b.links;
  });
  return result;
}

double network::bottleneck_capacity(const path& p) const {
  if (p.links.empty()) throw degenerate_query("bottleneck of an empty path");
  double cap = std::numeric_limits<double>::infinity();
  for (int e : p.links) {
    check_link(e);
    cap = std::min(cap, links_[e].idle_rate);
  }
  return cap;
}

double network::multipath_capacity(int n, int m) const {
  check_node(n);
  check_node(m);
  if (n == m) throw degenerate_query("multipath_capacity requires n != m");
  std::vector<double> cap(links_.size());
  for (std::size_t e = 0; e < links_.size(); ++e) cap[e] = links_[e].idle_rate;
  return max_flow(n, m, cap);
}

// Dinic over the directed multigraph with explicit capacities.
double network::max_flow(int s, int t, const std::vector<double>& cap) const {
  check_node(s);
  check_node(t);
  if (cap.size() != links_.size())
    throw invalid_parameter("capacity vector size mismatch");
  if (s == t) throw degenerate_query("max_flow requires s != t");

  struct arc {
    int to;
    double cap;
    int rev;
  };
  std::vector<std::vector<arc>> g(nodes_.size());
  for (std::size_t e = 0; e < links_.size(); ++e) {
    if (cap[e] <= kEps * 1e-3) continue;
    int u = links_[e].src, v = links_[e].dst;
    g[u].push_back({v, cap[e], static_cast<int>(g[v].size())});
    g[v].push_back({u, 0.0, static_cast<int>(g[u].size()) - 1});
  }

  std::vector<int> level(nodes_.size());
  std::vector<std::size_t> it(nodes_.size());
  double flow = 0.0;
  const double inf = std::numeric_limits<double>::infinity();

  auto bfs = [&]() -> bool {
    std::fill(level.begin(), level.end(), -1);
    std::queue<int> q;
    level[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const auto& a : g[u]) {
        if (a.cap > 1e-12 && level[a.to] < 0) {
          level[a.to] = level[u] + 1;
          q.push(a.to);
        }
      }
    }
    return level[t] >= 0;
  };

  auto dfs = [&](auto&& self, int u, double pushed) -> double {
    if (u == t) return pushed;
    for (; it[u] < g[u].size(); ++it[u]) {
      arc& a = g[u][it[u]];
      if (a.cap > 1e-12 && level[a.to] == level[u] + 1) {
        double d = self(self, a.to, std::min(pushed, a.cap));
        if (d > 1e-12) {
          a.cap -= d;
          g[a.to][a.rev].cap += d;
          return d;
        }
      }
    }
    return 0.0;
  };

  while (bfs()) {
    std::fill(it.begin(), it.end(), 0);
    while (double pushed = dfs(dfs, s, inf)) flow += pushed;
  }
  return flow;
}

std::vector<int> network::hop_distances(int src) const {
  check_node(src);
  std::vector<int> dist(nodes_.size(), -1);
  std::queue<int> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int e : out_[u]) {
      int v = links_[e].dst;
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

bool network::path_valid(const path& p) const {
  if (p.nodes.empty()) return false;
  if (p.links.size() + 1 != p.nodes.size()) return false;
  for (int n : p.nodes)
    if (n < 0 || n >= num_nodes()) return false;
  for (std::size_t i = 0; i < p.links.size(); ++i) {
    int e = p.links[i];
    if (e < 0 || e >= num_links()) return false;
    if (links_[e].src != p.nodes[i] || links_[e].dst != p.nodes[i + 1])
      return false;
  }
  // simple path: no repeated node
  std::vector<int> seen = p.nodes;
  std::sort(seen.begin(), seen.end());
  return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
}

}  // namespace migplan
