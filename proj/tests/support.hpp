#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "megcom/network.hpp"
#include "megcom/rng.hpp"
#include "megcom/tree.hpp"

namespace megcom::test {

inline Network weighted(int n, const std::vector<std::pair<Edge, double>>& edges,
                        PowerMode mode = PowerMode::Fixed) {
  return Network::from_edges(n, edges, mode);
}

/// Unit-weight-per-link graph in fixed mode (every link costs eps_s).
inline Network fixed_graph(int n, const std::vector<Edge>& edges, double w = 200.0) {
  std::vector<std::pair<Edge, double>> with;
  for (const auto& e : edges) with.emplace_back(e, w);
  return Network::from_edges(n, with, PowerMode::Fixed);
}

inline GroupSpec group_of(const std::vector<NodeId>& members, int packets = 1) {
  std::map<NodeId, int> p;
  for (NodeId m : members) p[m] = packets;
  return GroupSpec(p);
}

inline std::set<NodeId> as_set(const std::vector<NodeId>& v) { return {v.begin(), v.end()}; }

struct DeskInstance {
  Network net;
  GroupSpec group;
  std::uint64_t seed = 0;
};

/// Random connected instance with 6..9 nodes and 2..5 members.
inline DeskInstance desk_instance(std::uint64_t seed, PowerMode mode = PowerMode::Fixed,
                                  int packet_hi = 100) {
  auto rng = make_rng(seed, Stream::Membership, 77);
  int n = std::uniform_int_distribution<int>(6, 9)(rng);
  int m = std::uniform_int_distribution<int>(2, 5)(rng);
  DeskInstance out;
  out.seed = seed;
  out.net = generate_network(n, 1.0, 1.5, mode, 2.0, seed);
  std::vector<NodeId> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  std::map<NodeId, int> p;
  std::uniform_int_distribution<int> pk(1, packet_hi);
  for (int i = 0; i < m; ++i) p[ids[i]] = pk(rng);
  out.group = GroupSpec(p);
  return out;
}

/// Random spanning tree of a connected network (random-order Kruskal).
inline MulticastTree random_spanning_tree(const Network& net, std::mt19937_64& rng) {
  auto edges = net.edges();
  std::shuffle(edges.begin(), edges.end(), rng);
  std::vector<int> uf(net.size());
  for (int i = 0; i < net.size(); ++i) uf[i] = i;
  auto root = [&uf](int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  std::set<Edge> kept;
  for (const auto& e : edges) {
    int a = root(e.a), b = root(e.b);
    if (a == b) continue;
    uf[a] = b;
    kept.insert(e);
  }
  std::set<NodeId> nodes;
  for (int i = 0; i < net.size(); ++i) nodes.insert(i);
  return MulticastTree(nodes, kept);
}

}  // namespace megcom::test
