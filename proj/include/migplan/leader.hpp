#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "migplan/net.hpp"
#include "migplan/scenario.hpp"

namespace migplan {

// Memoized chi(n, m) rows (max-flow under idle rates).
class capacity_cache {
 public:
  explicit capacity_cache(const network& net) : net_(&net) {}

  double chi(int s, int t);
  double best_chi(int s);  // max over t != s
  const std::vector<double>& row(int s);

 private:
  const network* net_;
  std::map<int, std::vector<double>> rows_;
};

// Remaining compute/bandwidth after committing a prefix of agents, plus the
// used-as-destination indicator theta.
struct residual_state {
  std::vector<double> compute_left;  // per node
  std::vector<double> link_left;     // per link chain-reconnection budget
  std::vector<char> used;            // theta(n)

  static residual_state make(const network& net);
};

struct commit_record {
  int node = -1;
  bool was_used = false;
  path rho_minus, rho_plus;
};

// Shortest path src->dst over links whose residual supports `demand`,
// bounded by max_hops. Deterministic (adjacency is sorted). Empty path when
// src == dst.
std::optional<path> find_chain_path(const network& net,
                                    const residual_state& res, int src,
                                    int dst, double demand, int max_hops);

// Reserve agent f at node n: compute debit plus chain path reservations.
// Returns the undo record, or nullopt when infeasible (state untouched).
std::optional<commit_record> commit_agent(const network& net,
                                          residual_state& res, const agent& f,
                                          int n, int max_hops);
void undo_commit(const network& net, residual_state& res, const agent& f,
                 const commit_record& rec);

// candidate filter: enough remaining compute and chain paths within
// residual bandwidth; the failed host itself is excluded.
std::vector<int> candidate_set_nothrow(const network& net,
                                       const residual_state& res,
                                       const agent& f, int max_hops);
std::vector<int> candidate_set(const network& net, const residual_state& res,
                               const agent& f, int max_hops);

// priority value R * V / T.
double migration_priority(const agent& f);

// Observation order: argmax priority first, then repeated nearest neighbor by
// symmetrized hop distance between failure points. Returns agent indices.
std::vector<std::size_t> priority_tour(const std::vector<agent>& agents,
                                       const network& net);

struct leader_utilities_result {
  double u_n = 0.0, u_l = 0.0, u_p = 0.0, total = 0.0;
  std::vector<char> used;
};

// joint utility of a complete destination vector (original agent order).
leader_utilities_result leader_utilities(const std::vector<int>& destinations,
                                         const scenario& sc,
                                         capacity_cache& cache);

// raw placement score for node n hosting agent f under the given residuals.
double emission_utility(const scenario& sc, capacity_cache& cache,
                        const residual_state& res, const agent& f, int n);

struct hmm_model {
  int num_states = 0;
  std::vector<double> initial;                              // per state
  std::vector<std::vector<double>> emission;                // [obs][state]
  std::vector<std::vector<std::vector<double>>> transition; // [step][from][to]
};

// Crafted pseudo-probability model over (nodes, failed-agent tour).
hmm_model build_hmm(const scenario& sc, capacity_cache& cache,
                    const std::vector<std::size_t>& tour);

// Conditional destination distribution for one agent (normalized scores).
std::vector<double> destination_distribution(const scenario& sc,
                                             capacity_cache& cache,
                                             const residual_state& res,
                                             const agent& f);

// mean of the conditional distributions over the given VNF set.
std::vector<double> initial_probs(const scenario& sc, capacity_cache& cache,
                                  const std::vector<agent>& all_vnfs);

struct viterbi_path {
  std::vector<int> states;
  double log_prob = 0.0;
};

// Max-probability hidden sequence; throws infeasible_error when every
// sequence has probability zero.
viterbi_path viterbi_decode(const hmm_model& model);

struct leader_result {
  std::vector<int> destinations;  // original agent order
  std::vector<path> rho_minus, rho_plus;
  std::vector<char> used;
  double u_n = 0.0, u_l = 0.0, u_p = 0.0, total = 0.0;
};

leader_result viterbi_leader(const scenario& sc, capacity_cache& cache);
leader_result exhaustive_leader(const scenario& sc, capacity_cache& cache,
                                double budget = 2e6);
leader_result greedy_sort_leader(const scenario& sc, capacity_cache& cache);
leader_result random_leader(const scenario& sc, capacity_cache& cache,
                            std::uint64_t seed);

}  // namespace migplan
