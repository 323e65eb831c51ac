#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "megcom/network.hpp"
#include "megcom/types.hpp"

namespace megcom {

/// Unrooted tree over a subset of network nodes. A single node with no edges
/// is a valid (trivial) tree.
class MulticastTree {
 public:
  MulticastTree() = default;
  MulticastTree(std::set<NodeId> nodes, std::set<Edge> edges);
  static MulticastTree from_edges(const std::set<Edge>& edges);
  static MulticastTree single(NodeId v) { return MulticastTree({v}, {}); }

  const std::set<NodeId>& nodes() const { return nodes_; }
  const std::set<Edge>& edges() const { return edges_; }
  bool contains(NodeId v) const { return nodes_.count(v) != 0; }
  bool has_edge(const Edge& e) const { return edges_.count(e) != 0; }
  int degree(NodeId v) const;
  std::vector<NodeId> neighbors(NodeId v) const;

  /// lv(T): degree-one nodes.
  std::vector<NodeId> leaves() const;
  /// in(T): nodes with degree > 1.
  std::vector<NodeId> internal() const;

  /// |E| = |V| - 1 and connected.
  bool is_tree() const;
  bool spans(const std::vector<NodeId>& required) const;
  /// Every edge is a link of net.
  bool edges_in(const Network& net) const;

  void add_edge(const Edge& e);
  void remove_node(NodeId v);

  bool operator==(const MulticastTree& other) const = default;

 private:
  std::set<NodeId> nodes_;
  std::set<Edge> edges_;
  std::map<NodeId, int> degree_;
};

/// Sum of link weights, zeta(T).
double tree_weight(const MulticastTree& tree, const Network& net);

/// Repeatedly removes degree-one nodes outside `keep` until every leaf is in
/// `keep`. A trivial single-node tree is returned unchanged.
MulticastTree prune_leaves(MulticastTree tree, const std::set<NodeId>& keep);

/// Edge list `u v`, preceded by a `#terminals:` comment line.
void write_tree(std::ostream& out, const MulticastTree& tree, const std::vector<NodeId>& terminals);
MulticastTree read_tree(std::istream& in, std::vector<NodeId>* terminals = nullptr);

}  // namespace megcom
