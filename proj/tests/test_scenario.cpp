#include <cmath>
#include <set>

#include "doctest.h"
#include "migplan/pipeline.hpp"
#include "migplan/scenario.hpp"

using namespace migplan;

TEST_CASE("trapezoid construction: widths and full bipartite links") {
  auto net = gen_trapezoid(2, {3, 0.0, 10.0, 5.0, 10.0}, 1);
  CHECK(net.num_nodes() == 5);   // widths 3, 2
  CHECK(net.num_links() == 6);   // complete bipartite downward
  for (const auto& lk : net.links()) CHECK(lk.src < lk.dst);
  for (const auto& nd : net.nodes()) CHECK_FALSE(nd.idle);  // p_idle = 0
}

TEST_CASE("trapezoid idle draw is deterministic per seed") {
  auto a = gen_trapezoid(3, {4, 0.5, 10.0, 5.0, 10.0}, 7);
  auto b = gen_trapezoid(3, {4, 0.5, 10.0, 5.0, 10.0}, 7);
  REQUIRE(a.num_nodes() == b.num_nodes());
  for (int n = 0; n < a.num_nodes(); ++n)
    CHECK(a.node(n).idle == b.node(n).idle);
}

TEST_CASE("random grid link count extremes") {
  auto full = gen_grid_random(1, 3, 1.0, {}, 1);
  CHECK(full.num_links() == 6);
  auto empty = gen_grid_random(1, 3, 0.0, {}, 1);
  CHECK(empty.num_links() == 0);
}

TEST_CASE("10x10 grid at p=0.5 lands in the binomial band") {
  auto net = gen_grid_random(10, 10, 0.5, {}, 42);
  // 9900 ordered pairs, p = 0.5: mean 4950, sigma = sqrt(9900*0.25) ~ 49.75,
  // 5-sigma band [4701.3, 5198.7]
  CHECK(net.num_links() >= 4702);
  CHECK(net.num_links() <= 5198);
}

TEST_CASE("three-tier template: node count and edge uplinks") {
  for (int pods = 2; pods <= 5; ++pods) {
    auto net = gen_three_tier(pods, {}, 3);
    CHECK(net.num_nodes() == 9 * pods);
    // every edge node (the last 6 per pod) must have at least one uplink
    for (int n = 0; n < net.num_nodes(); ++n) {
      if (n < pods) continue;  // core
      CHECK(net.out_links(n).size() >= 1);
      CHECK(net.in_links(n).size() >= 1);
    }
  }
}

TEST_CASE("node load sampling: range, reproducibility, mean") {
  auto net = gen_grid_random(5, 5, 0.5, {}, 9);
  auto a = sample_node_loads(net, 8.0, 11);
  auto b = sample_node_loads(net, 8.0, 11);
  double sum = 0.0;
  int count = 0;
  for (int n = 0; n < a.num_nodes(); ++n) {
    CHECK(a.node(n).idle_compute >= 4.0);
    CHECK(a.node(n).idle_compute <= 8.0);
    CHECK(a.node(n).idle_compute == b.node(n).idle_compute);
  }
  // law-of-large-numbers check over many draws
  for (std::uint64_t s = 0; s < 400; ++s) {
    auto c = sample_node_loads(net, 8.0, 1000 + s);
    for (int n = 0; n < c.num_nodes(); ++n) {
      sum += c.node(n).idle_compute;
      ++count;
    }
  }
  double mean = sum / count;
  CHECK(mean == doctest::Approx(6.0).epsilon(0.02));
}

TEST_CASE("failure injection: ceiling count, identity, determinism") {
  auto net = gen_grid_random(4, 4, 0.6, {}, 5);
  auto pool = make_agent_pool(net, {}, 5);
  REQUIRE(pool.size() >= 3);

  auto all = inject_failures(pool, 1.0, 1);
  CHECK(all.size() == pool.size());

  std::vector<agent> ten(pool);
  ten.resize(std::min<std::size_t>(10, ten.size()));
  if (ten.size() == 10) {
    auto two = inject_failures(ten, 0.2, 1);
    CHECK(two.size() == 2);
  }

  auto x = inject_failures(pool, 0.4, 3);
  auto y = inject_failures(pool, 0.4, 3);
  REQUIRE(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i].id == y[i].id);
  // pool order preserved
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(x[i - 1].id < x[i].id);
}

TEST_CASE("agent pool draws one agent per non-idle node") {
  auto net = gen_grid_random(4, 4, 0.6, {}, 5);
  auto pool = make_agent_pool(net, {}, 5);
  std::set<int> hosts;
  int busy = 0;
  for (int n = 0; n < net.num_nodes(); ++n)
    if (!net.node(n).idle) ++busy;
  for (const auto& f : pool) {
    hosts.insert(f.failure_node);
    CHECK_FALSE(net.node(f.failure_node).idle);
    CHECK(f.state_size >= 1.0);
    CHECK(f.state_size <= 10.0);
    CHECK(f.tat >= 1.0);
    CHECK(f.tat <= 5.0);
    CHECK(f.in_rate >= 0.1);
    CHECK(f.in_rate <= 1.0);
    CHECK(f.prev_hop != f.failure_node);
    CHECK(f.next_hop != f.failure_node);
  }
  CHECK(static_cast<int>(hosts.size()) == busy);
}

TEST_CASE("scenario json round trip") {
  auto sc = make_grid_scenario(4, 4, 0.5, 0.3, 17);
  auto j = scenario_to_json(sc);
  auto back = scenario_from_json(j);
  CHECK(back.name == sc.name);
  CHECK(back.net.num_nodes() == sc.net.num_nodes());
  CHECK(back.net.num_links() == sc.net.num_links());
  REQUIRE(back.agents.size() == sc.agents.size());
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    CHECK(back.agents[i].id == sc.agents[i].id);
    CHECK(back.agents[i].state_size == sc.agents[i].state_size);
    CHECK(back.agents[i].failure_node == sc.agents[i].failure_node);
  }
  CHECK(back.max_hops == sc.max_hops);
  CHECK(back.link_queue_cost == sc.link_queue_cost);
  // second serialization is identical
  CHECK(scenario_to_json(back) == j);
}

TEST_CASE("scenario validation flags broken references") {
  auto sc = make_grid_scenario(3, 3, 0.6, 0.3, 23);
  CHECK_NOTHROW(sc.validate());
  auto broken = sc;
  REQUIRE_FALSE(broken.agents.empty());
  broken.agents[0].failure_node = 99;
  CHECK_THROWS_AS(broken.validate(), invalid_parameter);
  auto bad_weights = sc;
  bad_weights.w_forwarding = -0.2;
  CHECK_THROWS_AS(bad_weights.validate(), invalid_parameter);
}
