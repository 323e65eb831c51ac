#include "megcom/tree.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>

namespace megcom {

MulticastTree::MulticastTree(std::set<NodeId> nodes, std::set<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  for (const auto& e : edges_) {
    nodes_.insert(e.a);
    nodes_.insert(e.b);
    ++degree_[e.a];
    ++degree_[e.b];
  }
}

MulticastTree MulticastTree::from_edges(const std::set<Edge>& edges) { return MulticastTree({}, edges); }

int MulticastTree::degree(NodeId v) const {
  auto it = degree_.find(v);
  return it == degree_.end() ? 0 : it->second;
}

std::vector<NodeId> MulticastTree::neighbors(NodeId v) const {
  std::vector<NodeId> out;
  for (const auto& e : edges_) {
    if (e.touches(v)) out.push_back(e.other(v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> MulticastTree::leaves() const {
  std::vector<NodeId> out;
  for (NodeId v : nodes_) {
    if (degree(v) == 1) out.push_back(v);
  }
  return out;
}

std::vector<NodeId> MulticastTree::internal() const {
  std::vector<NodeId> out;
  for (NodeId v : nodes_) {
    if (degree(v) > 1) out.push_back(v);
  }
  return out;
}

bool MulticastTree::is_tree() const {
  if (nodes_.empty()) return false;
  if (edges_.size() + 1 != nodes_.size()) return false;
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const auto& e : edges_) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::set<NodeId> seen{*nodes_.begin()};
  std::queue<NodeId> queue;
  queue.push(*nodes_.begin());
  while (!queue.empty()) {
    NodeId x = queue.front();
    queue.pop();
    for (NodeId y : adj[x]) {
      if (seen.insert(y).second) queue.push(y);
    }
  }
  return seen.size() == nodes_.size();
}

bool MulticastTree::spans(const std::vector<NodeId>& required) const {
  return std::all_of(required.begin(), required.end(), [this](NodeId v) { return contains(v); });
}

bool MulticastTree::edges_in(const Network& net) const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [&net](const Edge& e) { return net.has_edge(e.a, e.b); });
}

void MulticastTree::add_edge(const Edge& e) {
  if (!edges_.insert(e).second) return;
  nodes_.insert(e.a);
  nodes_.insert(e.b);
  ++degree_[e.a];
  ++degree_[e.b];
}

void MulticastTree::remove_node(NodeId v) {
  for (auto it = edges_.begin(); it != edges_.end();) {
    if (it->touches(v)) {
      NodeId w = it->other(v);
      if (--degree_[w] == 0) degree_.erase(w);
      it = edges_.erase(it);
    } else {
      ++it;
    }
  }
  degree_.erase(v);
  nodes_.erase(v);
}

double tree_weight(const MulticastTree& tree, const Network& net) {
  double sum = 0.0;
  for (const auto& e : tree.edges()) sum += net.weight(e.a, e.b);
  return sum;
}

MulticastTree prune_leaves(MulticastTree tree, const std::set<NodeId>& keep) {
  bool changed = true;
  while (changed && tree.nodes().size() > 1) {
    changed = false;
    for (NodeId v : tree.leaves()) {
      if (!keep.count(v) && tree.nodes().size() > 1) {
        tree.remove_node(v);
        changed = true;
      }
    }
  }
  return tree;
}

void write_tree(std::ostream& out, const MulticastTree& tree, const std::vector<NodeId>& terminals) {
  out << "#terminals:";
  for (NodeId t : terminals) out << ' ' << t;
  out << '\n';
  if (tree.edges().empty() && !tree.nodes().empty()) out << "#node: " << *tree.nodes().begin() << '\n';
  for (const auto& e : tree.edges()) out << e.a << ' ' << e.b << '\n';
}

MulticastTree read_tree(std::istream& in, std::vector<NodeId>* terminals) {
  std::set<Edge> edges;
  std::set<NodeId> nodes;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    if (line.rfind("#terminals:", 0) == 0) {
      fields.ignore(11);
      NodeId t;
      while (terminals && fields >> t) terminals->push_back(t);
      continue;
    }
    if (line.rfind("#node:", 0) == 0) {
      fields.ignore(6);
      NodeId v;
      if (fields >> v) nodes.insert(v);
      continue;
    }
    NodeId a, b;
    if (!(fields >> a >> b)) throw PreconditionError("malformed tree line: " + line);
    edges.emplace(a, b);
  }
  return MulticastTree(std::move(nodes), std::move(edges));
}

}  // namespace megcom
