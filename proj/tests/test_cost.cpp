#include "doctest.h"
#include "migplan/cost.hpp"

using namespace migplan;

namespace {

node_rec host(double rc = 10.0, bool idle = true) { return {rc, idle}; }

agent mk_agent(int s, int lm, int lp, double v = 1.0, double t = 10.0,
               double cr = 1.0, double r = 0.0, double rp = 0.0) {
  agent f;
  f.state_size = v;
  f.tat = t;
  f.compute_demand = cr;
  f.in_rate = r;
  f.out_rate = rp;
  f.failure_node = s;
  f.prev_hop = lm;
  f.next_hop = lp;
  return f;
}

}  // namespace

TEST_CASE("migration time takes the slowest loaded link") {
  // V=8; e1: alpha=0.5, B^v=4, beta=0.5; e2: alpha=0.5, B^v=2, beta=1
  network net({host(), host(), host()},
              {{0, 1, 10, 4}, {0, 2, 10, 2}});
  migration_plan plan;
  plan.destinations = {1};
  plan.alpha = {{0.5, 0.5}};
  plan.beta = {{0.5, 1.0}};
  agent f = mk_agent(0, 2, 2, 8.0);
  CHECK(migration_time(f, 0, plan, net) == doctest::Approx(2.0));
}

TEST_CASE("migration time on a single saturating link is one") {
  network net({host(), host()}, {{0, 1, 10, 6}});
  migration_plan plan;
  plan.destinations = {1};
  plan.alpha = {{1.0}};
  plan.beta = {{1.0}};
  agent f = mk_agent(0, 1, 1, 6.0);  // V = B^v
  CHECK(migration_time(f, 0, plan, net) == doctest::Approx(1.0));
}

TEST_CASE("migration time matches the equal-discharge optimum") {
  // V=10, effective rates 4 and 1 -> equal discharge at alpha (0.8, 0.2),
  // both links finish at t=2 (LP-verified optimum for this split)
  network net({host(), host()}, {{0, 1, 10, 4}, {0, 1, 10, 1}});
  migration_plan plan;
  plan.destinations = {1};
  plan.alpha = {{0.8, 0.2}};
  plan.beta = {{1.0, 1.0}};
  agent f = mk_agent(0, 1, 1, 10.0);
  CHECK(migration_time(f, 0, plan, net) == doctest::Approx(2.0));
}

TEST_CASE("migration time error paths") {
  network net({host(), host()}, {{0, 1, 10, 4}});
  migration_plan plan;
  plan.destinations = {1};
  agent f = mk_agent(0, 1, 1, 8.0);

  plan.alpha = {{0.0}};
  plan.beta = {{1.0}};
  CHECK_THROWS_AS(migration_time(f, 0, plan, net), empty_plan_error);

  plan.alpha = {{1.0}};
  plan.beta = {{0.0}};  // loaded link granted no rate
  CHECK_THROWS_AS(migration_time(f, 0, plan, net), infeasible_error);
}

TEST_CASE("forwarding cost sums weighted migration times") {
  network net({host(), host()}, {{0, 1, 10, 4}});
  {
    // one agent, c_u=2, R=3, t = 8/4 = 2 -> 12
    migration_plan plan;
    plan.destinations = {1};
    plan.alpha = {{1.0}};
    plan.beta = {{1.0}};
    agent f = mk_agent(0, 1, 1, 8.0);
    f.unit_forward_cost = 2.0;
    f.in_rate = 3.0;
    CHECK(forwarding_cost({f}, plan, net) == doctest::Approx(12.0));
    f.in_rate = 0.0;
    CHECK(forwarding_cost({f}, plan, net) == doctest::Approx(0.0));
  }
  {
    // two agents on parallel links: (c_u=1, R=1, t=1) + (c_u=2, R=1, t=3)
    network net2({host(), host()}, {{0, 1, 10, 4}, {0, 1, 10, 4}});
    migration_plan plan;
    plan.destinations = {1, 1};
    plan.alpha = {{1.0, 0.0}, {0.0, 1.0}};
    plan.beta = {{1.0, 0.0}, {0.0, 1.0}};
    agent a = mk_agent(0, 1, 1, 4.0);
    a.in_rate = 1.0;
    agent b = mk_agent(0, 1, 1, 12.0);
    b.in_rate = 1.0;
    b.unit_forward_cost = 2.0;
    CHECK(forwarding_cost({a, b}, plan, net2) == doctest::Approx(7.0));
  }
}

TEST_CASE("congestion cost substitution and pole") {
  network net({host(), host()}, {{0, 1, 10, 5}});
  migration_plan plan;
  plan.destinations = {1};
  plan.alpha = {{1.0}};

  plan.beta = {{0.6}};
  CHECK(congestion_cost(plan, net, {1.0}) == doctest::Approx(5.0));

  plan.beta = {{0.0}};
  // idle baseline: B = B^v would give 1 per link; here 10/(5*1) = 2
  network idle_net({host(), host()},
                   {{0, 1, 5, 5}, {1, 0, 5, 5}, {0, 1, 5, 5}});
  migration_plan empty;
  empty.destinations = {};
  empty.alpha = {};
  empty.beta = {};
  CHECK(congestion_cost(empty, idle_net, {1.0, 1.0, 1.0}) ==
        doctest::Approx(3.0));

  plan.beta = {{1.0}};
  CHECK_THROWS_AS(congestion_cost(plan, net, {1.0}), unbounded_cost_error);
}

TEST_CASE("total cost mixes the two parts by weight") {
  // arrange fwd = 12 and cong = 5 on a one-link instance:
  // c_u=2, R=3, V=6, B^v=5, beta=0.6 -> t = 6/3 = 2, fwd = 12; cong = 5
  network net({host(), host()}, {{0, 1, 10, 5}});
  migration_plan plan;
  plan.destinations = {1};
  plan.alpha = {{1.0}};
  plan.beta = {{0.6}};
  agent f = mk_agent(0, 1, 1, 6.0);
  f.unit_forward_cost = 2.0;
  f.in_rate = 3.0;
  f.prev_hop = 0;
  f.next_hop = 1;
  plan.rho_minus = {path{{0, 1}, {0}}};
  plan.rho_plus = {path{{1}, {}}};

  auto all_fwd = total_cost({f}, plan, net, {1.0}, {1.0, 0.0});
  CHECK(all_fwd.total_cost == doctest::Approx(12.0));
  auto all_cong = total_cost({f}, plan, net, {1.0}, {0.0, 1.0});
  CHECK(all_cong.total_cost == doctest::Approx(5.0));
  auto half = total_cost({f}, plan, net, {1.0}, {0.5, 0.5});
  CHECK(half.total_cost == doctest::Approx(8.5));
}

TEST_CASE("alpha conservation checks") {
  // S=0 -> a=1 -> D=2
  network net({host(), host(), host()}, {{0, 1, 10, 5}, {1, 2, 10, 5}});
  agent f = mk_agent(0, 1, 1, 1.0);
  migration_plan plan;
  plan.destinations = {2};
  plan.beta = {{1.0, 1.0}};

  plan.alpha = {{1.0, 1.0}};
  CHECK(check_alpha_conservation({f}, plan, net).pass);

  plan.alpha = {{1.0, 0.0}};  // stops at the interior node
  CHECK_FALSE(check_alpha_conservation({f}, plan, net).pass);

  // split over two disjoint S->D paths
  network net2({host(), host(), host(), host()},
               {{0, 1, 10, 5}, {1, 3, 10, 5}, {0, 2, 10, 5}, {2, 3, 10, 5}});
  migration_plan plan2;
  plan2.destinations = {3};
  plan2.alpha = {{0.6, 0.6, 0.4, 0.4}};
  plan2.beta = {{1.0, 1.0, 1.0, 1.0}};
  CHECK(check_alpha_conservation({f}, plan2, net2).pass);
}

TEST_CASE("beta sign conservation checks") {
  network net({host(), host(), host()}, {{0, 1, 10, 5}, {1, 2, 10, 5}});
  agent f = mk_agent(0, 1, 1, 1.0);
  migration_plan plan;
  plan.destinations = {2};
  plan.alpha = {{1.0, 1.0}};

  plan.beta = {{0.5, 0.5}};  // valid flow scaled down
  CHECK(check_beta_conservation({f}, plan, net).pass);

  plan.beta = {{0.0, 0.5}};  // unbalanced at the interior node
  CHECK_FALSE(check_beta_conservation({f}, plan, net).pass);

  plan.beta = {{0.0, 0.0}};  // nothing arrives at the destination
  CHECK_FALSE(check_beta_conservation({f}, plan, net).pass);
}

TEST_CASE("chain establishment checks") {
  // L- = 0, S irrelevant, D = 1, L+ = 2, B^v = 2 each
  network net({host(), host(), host()}, {{0, 1, 10, 2}, {1, 2, 10, 2}});
  agent f = mk_agent(0, 0, 2, 1.0, 10.0, 1.0, 1.0, 1.0);
  migration_plan plan;
  plan.destinations = {1};
  plan.alpha = {{1.0, 0.0}};
  plan.beta = {{1.0, 0.0}};
  plan.rho_minus = {path{{0, 1}, {0}}};
  plan.rho_plus = {path{{1, 2}, {1}}};
  CHECK(check_chain_establishment({f}, plan, net).pass);

  // two agents sharing a link with R = 3 each against B^v = 5
  network net2({host(), host()}, {{0, 1, 10, 5}});
  agent g = mk_agent(0, 0, 1, 1.0, 10.0, 1.0, 3.0, 0.0);
  migration_plan plan2;
  plan2.destinations = {1, 1};
  plan2.alpha = {{1.0}, {1.0}};
  plan2.beta = {{0.5}, {0.5}};
  plan2.rho_minus = {path{{0, 1}, {0}}, path{{0, 1}, {0}}};
  plan2.rho_plus = {path{{1}, {}}, path{{1}, {}}};
  CHECK_FALSE(check_chain_establishment({g, g}, plan2, net2).pass);

  // zero chain rates always pass
  agent z = mk_agent(0, 0, 1, 1.0, 10.0, 1.0, 0.0, 0.0);
  CHECK(check_chain_establishment({z, z}, plan2, net2).pass);
}

TEST_CASE("node capacity checks") {
  network net({host(4.0), host(4.0)}, {{0, 1, 10, 5}});
  agent f = mk_agent(0, 0, 1, 1.0, 10.0, 2.0);
  migration_plan plan;
  plan.destinations = {1, 1};
  plan.alpha = {{1.0}, {1.0}};
  plan.beta = {{0.5}, {0.5}};
  CHECK(check_node_capacity({f, f}, plan, net).pass);  // 2+2 = 4, boundary

  network tight({host(4.0), host(3.0)}, {{0, 1, 10, 5}});
  CHECK_FALSE(check_node_capacity({f, f}, plan, tight).pass);

  migration_plan none;
  none.destinations = {};
  none.alpha = {};
  none.beta = {};
  CHECK(check_node_capacity({}, none, net).pass);  // vacuous
}

TEST_CASE("link share checks") {
  network net({host(), host()}, {{0, 1, 10, 5}});
  migration_plan plan;
  plan.destinations = {1, 1};
  plan.alpha = {{1.0}, {1.0}};

  plan.beta = {{0.4}, {0.6}};
  CHECK(check_link_share(plan, net).pass);  // boundary

  plan.beta = {{0.7}, {0.5}};
  CHECK_FALSE(check_link_share(plan, net).pass);

  migration_plan none;
  none.destinations = {};
  none.beta = {};
  CHECK(check_link_share(none, net).pass);
}

TEST_CASE("deadline checks at the boundary") {
  network net({host(), host()}, {{0, 1, 10, 4}});
  migration_plan plan;
  plan.destinations = {1};
  plan.alpha = {{1.0}};
  plan.beta = {{1.0}};

  agent ok = mk_agent(0, 1, 1, 8.0, 2.0);  // t = 8/4 = 2 = T
  CHECK(check_tat({ok}, plan, net).pass);

  agent late = mk_agent(0, 1, 1, 8.04, 2.0);  // t = 2.01 > T
  CHECK_FALSE(check_tat({late}, plan, net).pass);
}

TEST_CASE("full validation and single-section failure") {
  network net({host(4.0), host(4.0), host(4.0)},
              {{0, 1, 10, 5}, {1, 2, 10, 5}});
  agent f = mk_agent(0, 0, 2, 1.0, 10.0, 1.0, 1.0, 1.0);
  migration_plan plan;
  plan.destinations = {1};
  plan.alpha = {{1.0, 0.0}};
  plan.beta = {{0.5, 0.0}};
  plan.rho_minus = {path{{0, 1}, {0}}};
  plan.rho_plus = {path{{1, 2}, {1}}};
  auto rep = validate_plan({f}, plan, net);
  CHECK(rep.alpha_conservation.pass);
  CHECK(rep.beta_conservation.pass);
  CHECK(rep.chain.pass);
  CHECK(rep.node_capacity.pass);
  CHECK(rep.link_share.pass);
  CHECK(rep.tat.pass);
  CHECK(rep.feasible(true));

  // break exactly the share bound with a second agent's over-claim
  migration_plan over = plan;
  over.destinations = {1, 1};
  over.alpha = {{1.0, 0.0}, {1.0, 0.0}};
  over.beta = {{0.5, 0.0}, {0.7, 0.0}};
  over.rho_minus.push_back(path{{0, 1}, {0}});
  over.rho_plus.push_back(path{{1, 2}, {1}});
  agent g = f;
  g.in_rate = g.out_rate = 0.0;
  g.compute_demand = 0.5;
  auto rep2 = validate_plan({f, g}, over, net);
  CHECK(rep2.alpha_conservation.pass);
  CHECK(rep2.beta_conservation.pass);
  CHECK(rep2.chain.pass);
  CHECK(rep2.node_capacity.pass);
  CHECK_FALSE(rep2.link_share.pass);

  migration_plan empty;
  CHECK_THROWS_AS(validate_plan({f}, empty, net), incomplete_plan_error);
}

TEST_CASE("plan json round trip") {
  migration_plan plan;
  plan.destinations = {1, 2};
  plan.alpha = {{0.5, 0.5}, {1.0, 0.0}};
  plan.beta = {{0.25, 0.75}, {0.5, 0.0}};
  plan.rho_minus = {path{{0, 1}, {0}}, path{{2}, {}}};
  plan.rho_plus = {path{{1}, {}}, path{{2, 1}, {1}}};
  auto back = plan_from_json(plan_to_json(plan));
  CHECK(back.destinations == plan.destinations);
  CHECK(back.alpha == plan.alpha);
  CHECK(back.beta == plan.beta);
  CHECK(back.rho_minus == plan.rho_minus);
  CHECK(back.rho_plus == plan.rho_plus);
}

TEST_CASE("csv formatting is stable") {
  CHECK(cost_csv_header() ==
        "scenario,seed,algorithm,forwarding,congestion,total,max_time,feasible");
  CHECK(fmt_num(0.5) == "0.5");
  CHECK(fmt_num(1.0 / 3.0) == "0.333333333333");
  CHECK(fmt_num(2.0) == "2");
}
