#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "megcom/energy.hpp"
#include "megcom/oracles.hpp"
#include "support.hpp"

using namespace megcom;
using namespace megcom::test;

namespace {

const EnergyParams kParams{200.0, 20.0, 2.0};

Network uneven_path() {
  return Network::from_positions({{0, 0}, {1, 0}, {3, 0}}, 2.0, PowerMode::Adjustable);
}

}  // namespace

TEST_CASE("optimal tree on a path") {
  auto net = fixed_graph(3, {{0, 1}, {1, 2}});
  auto r = brute_opt_tree(net, group_of({0, 2}), kParams, PowerMode::Fixed);
  CHECK(r.objective == 880.0);
  CHECK(r.tree.edges() == std::set<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("optimal tree for adjacent members") {
  auto net = fixed_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  auto r = brute_opt_tree(net, group_of({0, 1}), kParams, PowerMode::Fixed);
  CHECK(r.objective == 2 * (200.0 + 20.0));
  CHECK(r.tree.edges() == std::set<Edge>{{0, 1}});
}

TEST_CASE("fewest internal nodes") {
  auto path = fixed_graph(3, {{0, 1}, {1, 2}});
  CHECK(brute_min_internal_tree(path, group_of({0, 2})).objective == 1.0);
  auto tri = fixed_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(brute_min_internal_tree(tri, group_of({0, 1})).objective == 0.0);
}

TEST_CASE("smallest internal broadcast power") {
  auto net = uneven_path();
  CHECK(brute_min_theta_tree(net, group_of({0, 1})).objective == 0.0);
  CHECK(brute_min_theta_tree(net, group_of({0, 2})).objective == doctest::Approx(4.0));
}

TEST_CASE("minimum guardian sets") {
  auto star = fixed_graph(4, {{0, 1}, {0, 2}, {0, 3}});
  auto r = brute_min_guardian(star, group_of({1, 2, 3}), GuardianPool::Buddies);
  CHECK(r.nodes == std::set<NodeId>{0});
  CHECK(r.objective == 1.0);

  // Two hubs, 0 and 3, each with its own pair of members.
  auto pairs = fixed_graph(7, {{0, 1}, {0, 2}, {3, 4}, {3, 5}, {0, 6}, {6, 3}});
  auto two = brute_min_guardian(pairs, group_of({1, 2, 4, 5}), GuardianPool::Buddies);
  CHECK(two.nodes == std::set<NodeId>{0, 3});

  auto members_only = brute_min_guardian(star, group_of({1, 2, 3}), GuardianPool::Members);
  CHECK(members_only.objective == 3.0);
}

TEST_CASE("minimum Steiner tree") {
  auto path = fixed_graph(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(brute_min_steiner(path, {0, 3}).tree.edges() == std::set<Edge>{{0, 1}, {1, 2}, {2, 3}});
  auto cycle = Network::from_edges(
      4, {{{0, 1}, 1.0}, {{1, 2}, 1.0}, {{2, 3}, 1.0}, {{0, 3}, 1.0}}, PowerMode::Fixed);
  auto r = brute_min_steiner(cycle, {0, 2});
  CHECK(r.objective == 2.0);
  CHECK(r.tree.edges() == std::set<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("oracle objectives agree with the energy model") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto mode = seed % 2 ? PowerMode::Fixed : PowerMode::Adjustable;
    auto inst = desk_instance(seed, mode);
    EnergyParams params{200.0, mode == PowerMode::Fixed ? 20.0 : 0.01, 2.0};
    auto r = brute_opt_tree(inst.net, inst.group, params, mode);
    REQUIRE(r.tree.is_tree());
    REQUIRE(r.tree.spans(inst.group.members()));
    CHECK(r.objective == doctest::Approx(psi(r.tree, inst.net, inst.group, params, mode).total));
    CHECK(r.objective ==
          doctest::Approx(psi_flooding(r.tree, inst.net, inst.group, params, mode)));
    CHECK(r.enumerated > 0);
  }
}

TEST_CASE("optimal trees respect the fixed-mode lower bounds") {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    auto inst = desk_instance(seed);
    auto r = brute_opt_tree(inst.net, inst.group, kParams, PowerMode::Fixed);
    auto lb = lower_bounds(r.tree, inst.group, kParams);
    CHECK(r.objective >= lb.bound1);
    CHECK(r.objective >= lb.bound2);
    auto fewest = brute_min_internal_tree(inst.net, inst.group);
    CHECK(fewest.objective <= static_cast<double>(r.tree.internal().size()));
  }
}

TEST_CASE("oracles are deterministic") {
  auto inst = desk_instance(7);
  auto a = brute_opt_tree(inst.net, inst.group, kParams, PowerMode::Fixed);
  auto b = brute_opt_tree(inst.net, inst.group, kParams, PowerMode::Fixed);
  CHECK(a.tree == b.tree);
  CHECK(a.objective == b.objective);
}

TEST_CASE("oracles refuse large inputs") {
  auto net = generate_network(kOracleMaxNodes + 1, 1.0, 2.0, PowerMode::Fixed, 2.0, 1);
  auto g = group_of({0, 1});
  CHECK_THROWS_AS(brute_opt_tree(net, g, kParams, PowerMode::Fixed), PreconditionError);
  CHECK_THROWS_AS(brute_min_steiner(net, {0, 1}), PreconditionError);

  std::vector<Edge> edges;
  for (int i = 1; i <= 22; ++i) edges.emplace_back(0, i);
  auto big_star = fixed_graph(23, edges);
  std::vector<NodeId> leaves;
  for (int i = 1; i <= 22; ++i) leaves.push_back(i);
  CHECK_THROWS_AS(brute_min_guardian(big_star, group_of(leaves), GuardianPool::Members),
                  PreconditionError);
}
