#include "megcom/steiner.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "megcom/protocol.hpp"
#include "megcom/rng.hpp"

namespace megcom {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

MulticastTree assemble_steiner(const ShortestPaths& paths, const std::set<Edge>& closure_edges,
                               const std::set<NodeId>& terminals) {
  if (terminals.empty()) throw PreconditionError("no terminals");
  if (closure_edges.empty()) return MulticastTree::single(*terminals.begin());
  const Network& net = paths.network();
  std::set<Edge> expanded;
  for (const auto& ce : closure_edges) {
    auto p = paths.canonical_path(ce.a, ce.b);
    for (size_t i = 0; i + 1 < p.size(); ++i) expanded.emplace(p[i], p[i + 1]);
  }
  std::vector<std::tuple<double, NodeId, NodeId>> order;
  for (const auto& e : expanded) order.emplace_back(net.weight(e.a, e.b), e.a, e.b);
  std::sort(order.begin(), order.end());
  DisjointSets sets(net.size());
  std::set<Edge> kept;
  for (const auto& [w, a, b] : order) {
    if (sets.unite(a, b)) kept.emplace(a, b);
  }
  MulticastTree tree = prune_leaves(MulticastTree::from_edges(kept), terminals);
  std::vector<NodeId> required(terminals.begin(), terminals.end());
  if (!tree.is_tree() || !tree.spans(required)) {
    throw AlgorithmError("closure edges do not connect the terminals");
  }
  return tree;
}

std::set<Edge> closure_mst(const ShortestPaths& paths, const std::set<NodeId>& terminals) {
  std::vector<std::tuple<double, NodeId, NodeId>> order;
  for (NodeId x : terminals) {
    for (NodeId y : terminals) {
      if (x < y) order.emplace_back(paths.cost(x, y), x, y);
    }
  }
  std::sort(order.begin(), order.end());
  DisjointSets sets(paths.network().size());
  std::set<Edge> mst;
  for (const auto& [c, a, b] : order) {
    if (sets.unite(a, b)) mst.emplace(a, b);
  }
  return mst;
}

MulticastTree kmb_centralized(const ShortestPaths& paths, const std::set<NodeId>& terminals) {
  if (terminals.empty()) throw PreconditionError("no terminals");
  return assemble_steiner(paths, closure_mst(paths, terminals), terminals);
}

DistributedSteiner kruskal_sph_distributed(const Network& net, const ShortestPaths& paths,
                                           const std::set<NodeId>& terminals, std::uint64_t seed,
                                           const KernelOptions& options) {
  if (terminals.empty()) throw PreconditionError("no terminals");
  std::map<NodeId, int> packets;
  for (NodeId t : terminals) {
    if (!net.contains(t)) throw PreconditionError("terminal outside the network");
    packets[t] = 1;
  }
  ProtocolConfig config;
  config.stage1 = Stage1::None;
  MegcomProtocol protocol(net, GroupSpec(packets), config);
  DistributedSteiner out;
  out.outcome = run_protocol(net, paths, protocol.initial_state(), protocol, seed, options);
  if (out.outcome.links.size() + 1 != terminals.size()) {
    throw LivelockError("fragment merging stopped with " +
                            std::to_string(out.outcome.links.size()) + " links for " +
                            std::to_string(terminals.size()) + " terminals",
                        out.outcome.trace);
  }
  out.tree = assemble_steiner(paths, out.outcome.links, terminals);
  return out;
}

MulticastTree spt_baseline(const ShortestPaths& paths, const GroupSpec& group, std::uint64_t seed) {
  const auto& members = group.members();
  if (members.size() < 2) throw PreconditionError("group needs at least two members");
  auto rng = make_rng(seed, Stream::Root);
  std::uniform_int_distribution<size_t> pick(0, members.size() - 1);
  const NodeId root = members[pick(rng)];
  // Every path walks toward the root on the root's distance row, so each
  // node has a single next hop and the union is a tree.
  std::set<Edge> edges;
  for (NodeId m : members) {
    auto p = paths.path(m, root);
    for (size_t i = 0; i + 1 < p.size(); ++i) edges.emplace(p[i], p[i + 1]);
  }
  MulticastTree tree = MulticastTree::from_edges(edges);
  if (!tree.is_tree()) throw AlgorithmError("shortest-path union is not a tree");
  return prune_non_member_leaves(tree, group);
}

DistributedSteiner cap_tree(const Network& net, const ShortestPaths& paths, const GroupSpec& group,
                            std::uint64_t seed, const KernelOptions& options) {
  group.validate(net);
  if (net.mode() != PowerMode::Adjustable) {
    throw PreconditionError("CAP requires adjustable-power link costs");
  }
  std::set<NodeId> terminals(group.members().begin(), group.members().end());
  auto out = kruskal_sph_distributed(net, paths, terminals, seed, options);
  out.tree = prune_non_member_leaves(out.tree, group);
  return out;
}

MulticastTree prune_non_member_leaves(const MulticastTree& tree, const GroupSpec& group) {
  std::set<NodeId> keep(group.members().begin(), group.members().end());
  return prune_leaves(tree, keep);
}

}  // namespace megcom
