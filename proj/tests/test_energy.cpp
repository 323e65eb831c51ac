#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "megcom/energy.hpp"
#include "support.hpp"

using namespace megcom;
using namespace megcom::test;

namespace {

const EnergyParams kParams{200.0, 20.0, 2.0};

Network uneven_path() {
  return Network::from_positions({{0, 0}, {1, 0}, {3, 0}}, 2.0, PowerMode::Adjustable);
}

}  // namespace

TEST_CASE("two members on one edge") {
  auto net = fixed_graph(2, {{0, 1}});
  auto tree = MulticastTree::from_edges({{0, 1}});
  auto g = group_of({0, 1});
  CHECK(psi(tree, net, g, kParams, PowerMode::Fixed).total == 440.0);
  CHECK(psi_flooding(tree, net, g, kParams, PowerMode::Fixed) == 440.0);
}

TEST_CASE("path through a relay") {
  auto net = fixed_graph(3, {{0, 1}, {1, 2}});
  auto tree = MulticastTree::from_edges({{0, 1}, {1, 2}});
  auto g = group_of({0, 2});
  CHECK(psi(tree, net, g, kParams, PowerMode::Fixed).total == 880.0);
  CHECK(psi_flooding(tree, net, g, kParams, PowerMode::Fixed) == 880.0);
}

TEST_CASE("star with a relaying center") {
  auto net = fixed_graph(4, {{0, 1}, {0, 2}, {0, 3}});
  auto tree = MulticastTree::from_edges({{0, 1}, {0, 2}, {0, 3}});
  auto g = group_of({1, 2, 3});
  auto b = psi(tree, net, g, kParams, PowerMode::Fixed);
  CHECK(b.total == 1380.0);
  CHECK(b.tx_internal == 600.0);
  CHECK(b.tx_leaf == 600.0);
  CHECK(b.rx_total == 180.0);
  CHECK(psi_flooding(tree, net, g, kParams, PowerMode::Fixed) == 1380.0);
}

TEST_CASE("adjustable power on an uneven path") {
  auto net = uneven_path();
  auto tree = MulticastTree::from_edges({{0, 1}, {1, 2}});
  auto g = group_of({0, 2});
  EnergyParams params{200.0, 1.0, 2.0};
  CHECK(psi(tree, net, g, params, PowerMode::Adjustable).total == doctest::Approx(17.0));
  CHECK(psi_flooding(tree, net, g, params, PowerMode::Adjustable) == doctest::Approx(17.0));

  auto lt = lambda_theta(tree, net);
  CHECK(lt.lambda.at(0) == doctest::Approx(1.0));
  CHECK(lt.lambda.at(1) == doctest::Approx(4.0));
  CHECK(lt.lambda.at(2) == doctest::Approx(4.0));
  CHECK(lt.theta == doctest::Approx(4.0));
  CHECK(lt.zeta == doctest::Approx(5.0));
}

TEST_CASE("two-node tree has no internal broadcast") {
  auto net = uneven_path();
  auto lt = lambda_theta(MulticastTree::from_edges({{0, 1}}), net);
  CHECK(lt.theta == 0.0);
}

TEST_CASE("energy guards") {
  auto net = fixed_graph(2, {{0, 1}});
  auto tree = MulticastTree::from_edges({{0, 1}});
  CHECK_THROWS_AS(psi(tree, net, group_of({0}), kParams, PowerMode::Fixed), PreconditionError);
  CHECK_THROWS_AS(psi_flooding(tree, net, group_of({0}), kParams, PowerMode::Fixed),
                  PreconditionError);
  auto line = fixed_graph(3, {{0, 1}, {1, 2}});
  CHECK_THROWS_AS(psi(tree, line, group_of({0, 2}), kParams, PowerMode::Fixed),
                  PreconditionError);
}

TEST_CASE("closed form matches flooding on random trees") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    auto mode = trial % 2 ? PowerMode::Adjustable : PowerMode::Fixed;
    int n = 3 + trial % 10;
    auto net = generate_network(n, 1.0, 1.8, mode, 2.0, 1000 + trial);
    auto tree = random_spanning_tree(net, rng);
    std::map<NodeId, int> p;
    for (NodeId v = 0; v < n; ++v) {
      if (rng() % 2) p[v] = 1 + static_cast<int>(rng() % 100);
    }
    if (p.size() < 2) p[0] = p[n - 1] = 3;
    GroupSpec g(p);
    EnergyParams params{200.0, mode == PowerMode::Fixed ? 20.0 : 0.05, 2.0};
    double closed = psi(tree, net, g, params, mode).total;
    double flood = psi_flooding(tree, net, g, params, mode);
    if (mode == PowerMode::Fixed) {
      CHECK(closed == flood);
    } else {
      CHECK(std::abs(closed - flood) <= 1e-9 * std::abs(flood));
    }
  }
}

TEST_CASE("internal broadcast cost is at most twice the tree weight") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    auto net = generate_network(8, 1.0, 1.6, PowerMode::Adjustable, 2.0, 500 + trial);
    auto lt = lambda_theta(random_spanning_tree(net, rng), net);
    CHECK(lt.theta <= 2.0 * lt.zeta + 1e-9);
  }
}

TEST_CASE("session energy respects both lower bounds") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto net = generate_network(10, 1.0, 1.6, PowerMode::Fixed, 2.0, 700 + trial);
    auto tree = random_spanning_tree(net, rng);
    std::map<NodeId, int> p;
    for (NodeId v = 0; v < net.size(); v += 2) p[v] = 1 + static_cast<int>(rng() % 100);
    GroupSpec g(p);
    auto lb = lower_bounds(tree, g, kParams);
    double total = psi(tree, net, g, kParams, PowerMode::Fixed).total;
    CHECK(total >= lb.bound1);
    CHECK(total >= lb.bound2);
  }
}

TEST_CASE("tree file round-trip") {
  auto tree = MulticastTree::from_edges({{0, 3}, {3, 4}, {4, 7}});
  std::stringstream buf;
  write_tree(buf, tree, {0, 7});
  std::vector<NodeId> terms;
  auto back = read_tree(buf, &terms);
  CHECK(back == tree);
  CHECK(terms == std::vector<NodeId>{0, 7});
}

TEST_CASE("tree shape helpers") {
  auto tree = MulticastTree::from_edges({{0, 1}, {1, 2}, {1, 3}});
  CHECK(tree.is_tree());
  CHECK(tree.internal() == std::vector<NodeId>{1});
  CHECK(tree.leaves() == std::vector<NodeId>{0, 2, 3});
  auto cyc = MulticastTree::from_edges({{0, 1}, {1, 2}, {0, 2}});
  CHECK_FALSE(cyc.is_tree());
}
