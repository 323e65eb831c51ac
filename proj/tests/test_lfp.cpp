#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "megcom/energy.hpp"
#include "megcom/lfp.hpp"
#include "megcom/oracles.hpp"
#include "support.hpp"

using namespace megcom;
using namespace megcom::test;

namespace {

MaintainedTree maintained(const Network& net, const ShortestPaths& sp, const GroupSpec& g) {
  auto run = run_lfp(net, sp, g, 1);
  return {g, run.assignment, run.tree};
}

void check_guarded_properly(const Network& net, const GroupSpec& g, const GuardianAssignment& a) {
  auto buddies = buddy_set(net, g);
  for (NodeId c : a.guardians) CHECK(buddies.count(c));
  CHECK(covers(net, g, a.guardians));
  for (NodeId m : g.members()) {
    REQUIRE(a.guarded.count(m));
    NodeId c = a.guarded.at(m);
    CHECK(a.guardians.count(c));
    if (c != m) {
      CHECK(net.has_edge(m, c));
      CHECK(a.guard_edges.count(Edge(m, c)));
    }
  }
}

}  // namespace

TEST_CASE("buddy set of a star with a relay center") {
  auto net = fixed_graph(4, {{0, 1}, {0, 2}, {0, 3}});
  auto g = group_of({1, 2, 3});
  CHECK(buddy_set(net, g) == std::set<NodeId>{0});
}

TEST_CASE("buddy set of a member triangle") {
  auto net = fixed_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(buddy_set(net, group_of({0, 1, 2})) == std::set<NodeId>{0, 1, 2});
}

TEST_CASE("star center becomes the only guardian") {
  auto net = fixed_graph(4, {{0, 1}, {0, 2}, {0, 3}});
  ShortestPaths sp(net);
  auto g = group_of({1, 2, 3});
  auto run = run_lfp(net, sp, g, 1);
  CHECK(run.assignment.guardians == std::set<NodeId>{0});
  CHECK(run.tree.edges() == std::set<Edge>{{0, 1}, {0, 2}, {0, 3}});
  CHECK(psi(run.tree, net, g, {}, PowerMode::Fixed).total == 1380.0);
}

TEST_CASE("member triangle elects its smallest id") {
  auto net = fixed_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  ShortestPaths sp(net);
  auto g = group_of({0, 1, 2});
  auto run = lfp_stage1(net, sp, g, 7);
  CHECK(run.assignment.guardians == std::set<NodeId>{0});
  CHECK(run.assignment == greedy_guardian_cover(net, g));
  CHECK(run.tree.nodes().empty());
}

TEST_CASE("two guardians each guarding one member") {
  GuardianAssignment a;
  a.guardians = {1, 2};
  a.guarded = {{0, 1}, {3, 2}};
  a.guard_edges = {{0, 1}, {2, 3}};
  auto tree = compose_tree(a, MulticastTree::from_edges({{1, 2}}), group_of({0, 3}));
  CHECK(tree.edges() == std::set<Edge>{{0, 1}, {1, 2}, {2, 3}});
  CHECK(tree.internal() == std::vector<NodeId>{1, 2});
}

TEST_CASE("guardian selection covers every member from the buddy set") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto net = generate_network(80, 1.0, 2.0, PowerMode::Fixed, 2.0, seed);
    auto g = select_group(net, 0.1 + 0.02 * static_cast<double>(seed), 1, 100, seed);
    ShortestPaths sp(net);
    auto run = run_lfp(net, sp, g, seed);
    check_guarded_properly(net, g, run.assignment);
    CHECK(run.tree.is_tree());
    CHECK(run.tree.spans(g.members()));
    CHECK(run.tree.edges_in(net));
    for (NodeId c : run.assignment.guardians) CHECK(run.tree.contains(c));
    for (NodeId leaf : run.tree.leaves()) CHECK(g.is_member(leaf));
  }
}

TEST_CASE("counting without the self term still covers") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    auto inst = desk_instance(seed);
    ShortestPaths sp(inst.net);
    LfpOptions opts;
    opts.self_count = false;
    auto run = run_lfp(inst.net, sp, inst.group, seed, opts);
    check_guarded_properly(inst.net, inst.group, run.assignment);
    CHECK(run.tree.spans(inst.group.members()));
  }
}

TEST_CASE("guardian count stays within the greedy cover ratio") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto inst = desk_instance(seed);
    ShortestPaths sp(inst.net);
    auto run = lfp_stage1(inst.net, sp, inst.group, seed);
    auto best = brute_min_guardian(inst.net, inst.group, GuardianPool::Buddies);
    double delta = compute_metrics(inst.net).max_degree;
    CHECK(static_cast<double>(run.assignment.guardians.size()) / best.objective <=
          std::log(delta + 1.0) + 1.0);
  }
}

TEST_CASE("join next to a guardian adds one guard edge") {
  auto net = fixed_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {1, 5}});
  ShortestPaths sp(net);
  auto state = maintained(net, sp, group_of({0, 2}));
  REQUIRE(state.assignment.guardians == std::set<NodeId>{1});
  auto before = state.tree.edges();
  auto report = member_join(state, net, sp, 5);
  CHECK(report.action == MaintenanceAction::AttachedToGuardian);
  before.insert(Edge(1, 5));
  CHECK(state.tree.edges() == before);
  CHECK(state.assignment.guarded.at(5) == 1);
}

TEST_CASE("join far from every guardian grows a path") {
  auto net = fixed_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {1, 5}});
  ShortestPaths sp(net);
  auto state = maintained(net, sp, group_of({0, 2}));
  auto report = member_join(state, net, sp, 4);
  CHECK(report.action == MaintenanceAction::PathToGuardian);
  CHECK(state.tree.is_tree());
  CHECK(state.tree.spans(state.group.members()));
  CHECK(state.tree.edges() == std::set<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  CHECK(psi(state.tree, net, state.group, {}, PowerMode::Fixed).total ==
        psi_flooding(state.tree, net, state.group, {}, PowerMode::Fixed));
}

TEST_CASE("join of an existing member is refused") {
  auto net = fixed_graph(3, {{0, 1}, {1, 2}});
  ShortestPaths sp(net);
  auto state = maintained(net, sp, group_of({0, 2}));
  CHECK_THROWS_AS(member_join(state, net, sp, 0), PreconditionError);
}

TEST_CASE("leaf member leaves") {
  auto net = fixed_graph(4, {{0, 1}, {0, 2}, {0, 3}});
  ShortestPaths sp(net);
  auto state = maintained(net, sp, group_of({1, 2, 3}));
  auto report = member_leave(state, net, 3);
  CHECK(report.action == MaintenanceAction::RemovedLeaf);
  CHECK(state.tree.edges() == std::set<Edge>{{0, 1}, {0, 2}});
}

TEST_CASE("guardian with two tree neighbors leaves") {
  auto net = fixed_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  MaintainedTree state;
  state.group = group_of({0, 1, 2});
  state.assignment.guardians = {1};
  state.assignment.guarded = {{0, 1}, {1, 1}, {2, 1}};
  state.assignment.guard_edges = {{0, 1}, {1, 2}};
  state.tree = MulticastTree::from_edges({{0, 1}, {1, 2}});
  auto report = member_leave(state, net, 1);
  CHECK(report.action == MaintenanceAction::Remerged);
  CHECK(state.tree.is_tree());
  CHECK(state.tree.edges() == std::set<Edge>{{0, 3}, {2, 3}});
  CHECK(state.assignment.guardians == std::set<NodeId>{0, 2});
}

TEST_CASE("leave guards") {
  auto net = fixed_graph(3, {{0, 1}, {1, 2}});
  ShortestPaths sp(net);
  auto state = maintained(net, sp, group_of({0, 2}));
  CHECK_THROWS_AS(member_leave(state, net, 0), PreconditionError);
  CHECK_THROWS_AS(member_leave(state, net, 1), PreconditionError);
}

TEST_CASE("random joins and leaves keep a spanning tree") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto net = generate_network(40, 1.0, 2.0, PowerMode::Fixed, 2.0, seed);
    auto g = select_group(net, 0.3, 1, 10, seed);
    ShortestPaths sp(net);
    auto state = maintained(net, sp, g);
    auto rng = make_rng(seed, Stream::Membership, 5);
    for (int step = 0; step < 12; ++step) {
      NodeId v = static_cast<NodeId>(rng() % net.size());
      if (state.group.is_member(v)) {
        if (state.group.size() <= 2) continue;
        member_leave(state, net, v);
      } else {
        member_join(state, net, sp, v);
      }
      REQUIRE(state.tree.is_tree());
      REQUIRE(state.tree.spans(state.group.members()));
      CHECK(state.tree.edges_in(net));
    }
  }
}
