#pragma once
#include <utility>
#include <vector>

#include "migplan/errors.hpp"

namespace migplan {

struct link_rec {
  int src = 0;
  int dst = 0;
  double nominal_rate = 0.0;  // B(e)
  double idle_rate = 0.0;     // B^v(e)
};

struct node_rec {
  double idle_compute = 0.0;  // R_c(n)
  bool idle = false;          // iota(n)
};

// Simple directed walk; nodes has one more entry than links.
// A path with no links (nodes = {n}) stands for a degenerate src==dst hop,
// used for chain reconnection when the neighbor already is the destination.
struct path {
  std::vector<int> nodes;
  std::vector<int> links;

  bool empty() const { return links.empty(); }
  int src() const { return nodes.front(); }
  int dst() const { return nodes.back(); }
  int hops() const { return static_cast<int>(links.size()); }

  bool operator==(const path&) const = default;
};

bool path_traverses(int e, const path& p);

// Directed capacitated graph. Immutable after construction; all queries are
// const and safe to run concurrently.
class network {
 public:
  network() = default;
  network(std::vector<node_rec> nodes, std::vector<link_rec> links);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_links() const { return static_cast<int>(links_.size()); }
  const node_rec& node(int n) const;
  const link_rec& link(int e) const;
  const std::vector<node_rec>& nodes() const { return nodes_; }
  const std::vector<link_rec>& links() const { return links_; }

  const std::vector<int>& out_links(int n) const;
  const std::vector<int>& in_links(int n) const;

  // (S_b, D_b): S_b = 1 iff n is the tail of e, D_b = 1 iff n is the head.
  std::pair<int, int> incidence(int e, int n) const;

  // All simple directed paths src -> dst with at most max_hops links,
  // ordered lexicographically by node sequence (then by link ids, so
  // parallel links enumerate deterministically).
  std::vector<path> enumerate_paths(int src, int dst, int max_hops,
                                    std::size_t budget = 200000) const;

  // kappa(p): min idle rate along the path.
  double bottleneck_capacity(const path& p) const;

  // chi(n, m): max-flow value n -> m under idle-rate capacities.
  double multipath_capacity(int n, int m) const;

  // Max-flow with explicit per-link capacities (Dinic).
  double max_flow(int s, int t, const std::vector<double>& cap) const;

  // Unweighted BFS hop distances from src; -1 where unreachable.
  std::vector<int> hop_distances(int src) const;

  // Verifies the path invariants against this graph.
  bool path_valid(const path& p) const;

 private:
  void check_node(int n) const;
  void check_link(int e) const;

  std::vector<node_rec> nodes_;
  std::vector<link_rec> links_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

}  // namespace migplan
