#include "doctest.h"
#include "migplan/net.hpp"

using namespace migplan;

namespace {

network make(std::vector<node_rec> nodes, std::vector<link_rec> links) {
  return network(std::move(nodes), std::move(links));
}

node_rec plain() { return {10.0, false}; }

}  // namespace

TEST_CASE("incidence classifies tail, head and bystander") {
  auto net = make({plain(), plain(), plain()}, {{0, 1, 10, 5}});
  CHECK(net.incidence(0, 0) == std::pair<int, int>{1, 0});
  CHECK(net.incidence(0, 1) == std::pair<int, int>{0, 1});
  CHECK(net.incidence(0, 2) == std::pair<int, int>{0, 0});
}

TEST_CASE("construction rejects broken references") {
  CHECK_THROWS_AS(make({plain()}, {{0, 1, 10, 5}}), invalid_parameter);
  CHECK_THROWS_AS(make({plain(), plain()}, {{0, 1, 4, 5}}), invalid_parameter);
  CHECK_THROWS_AS(make({plain(), plain()}, {{0, 1, -1, -2}}), invalid_parameter);
}

TEST_CASE("path enumeration on a triangle") {
  // s=0, a=1, d=2
  auto net = make({plain(), plain(), plain()},
                  {{0, 2, 10, 5}, {0, 1, 10, 5}, {1, 2, 10, 5}});
  auto paths = net.enumerate_paths(0, 2, 2);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].nodes == std::vector<int>{0, 1, 2});
  CHECK(paths[1].nodes == std::vector<int>{0, 2});
}

TEST_CASE("path enumeration respects disconnection and hop bounds") {
  auto disconnected = make({plain(), plain()}, {});
  CHECK(disconnected.enumerate_paths(0, 1, 5).empty());

  auto chain = make({plain(), plain(), plain(), plain()},
                    {{0, 1, 10, 5}, {1, 2, 10, 5}, {2, 3, 10, 5}});
  CHECK(chain.enumerate_paths(0, 3, 2).empty());
  CHECK(chain.enumerate_paths(0, 3, 3).size() == 1);
}

TEST_CASE("path enumeration distinguishes parallel links") {
  auto net = make({plain(), plain()}, {{0, 1, 10, 5}, {0, 1, 10, 3}});
  auto paths = net.enumerate_paths(0, 1, 1);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].links == std::vector<int>{0});
  CHECK(paths[1].links == std::vector<int>{1});
}

TEST_CASE("bottleneck capacity is the minimum idle rate") {
  auto net = make({plain(), plain(), plain(), plain()},
                  {{0, 1, 10, 3}, {1, 2, 10, 1}, {2, 3, 10, 5}});
  path p{{0, 1, 2, 3}, {0, 1, 2}};
  CHECK(net.bottleneck_capacity(p) == doctest::Approx(1.0));

  auto single = make({plain(), plain()}, {{0, 1, 10, 4}});
  CHECK(single.bottleneck_capacity({{0, 1}, {0}}) == doctest::Approx(4.0));

  auto saturated = make({plain(), plain()}, {{0, 1, 10, 0}});
  CHECK(saturated.bottleneck_capacity({{0, 1}, {0}}) == doctest::Approx(0.0));
}

TEST_CASE("multipath capacity sums disjoint paths") {
  // s=0 -> a=1 -> d=3 (bottleneck 3) and s=0 -> b=2 -> d=3 (bottleneck 1)
  auto net = make({plain(), plain(), plain(), plain()},
                  {{0, 1, 10, 3}, {1, 3, 10, 3}, {0, 2, 10, 1}, {2, 3, 10, 1}});
  CHECK(net.multipath_capacity(0, 3) == doctest::Approx(4.0));
  CHECK(net.multipath_capacity(3, 0) == doctest::Approx(0.0));
}

TEST_CASE("multipath capacity on the diamond") {
  auto net = make({plain(), plain(), plain(), plain()},
                  {{0, 1, 10, 2}, {0, 2, 10, 2}, {1, 3, 10, 2}, {2, 3, 10, 2}});
  // max-flow oracle by hand: both branches carry 2
  CHECK(net.multipath_capacity(0, 3) == doctest::Approx(4.0));
}

TEST_CASE("max flow honors explicit capacities and parallel links") {
  auto net = make({plain(), plain()}, {{0, 1, 10, 5}, {0, 1, 10, 3}});
  CHECK(net.max_flow(0, 1, {2.0, 1.5}) == doctest::Approx(3.5));
  CHECK(net.max_flow(0, 1, {0.0, 0.0}) == doctest::Approx(0.0));
}

TEST_CASE("hop distances from a source") {
  auto net = make({plain(), plain(), plain(), plain()},
                  {{0, 1, 10, 5}, {1, 2, 10, 5}});
  auto d = net.hop_distances(0);
  CHECK(d == std::vector<int>{0, 1, 2, -1});
}

TEST_CASE("path traversal indicator") {
  path p{{0, 1, 2}, {0, 1}};
  CHECK(path_traverses(0, p));
  CHECK(path_traverses(1, p));
  CHECK_FALSE(path_traverses(7, p));
}

TEST_CASE("path validity checks continuity against the graph") {
  auto net = make({plain(), plain(), plain()},
                  {{0, 1, 10, 5}, {1, 2, 10, 5}});
  CHECK(net.path_valid({{0, 1, 2}, {0, 1}}));
  CHECK_FALSE(net.path_valid({{0, 2}, {1}}));
  CHECK(net.path_valid({{1}, {}}));  // degenerate single-node path
}
