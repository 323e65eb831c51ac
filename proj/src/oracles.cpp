#include "megcom/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>

#include "megcom/lfp.hpp"

namespace megcom {

namespace {

using Key = std::array<double, 2>;

struct Candidate {
  const std::vector<NodeId>& nodes;
  const std::vector<Edge>& edges;
  const std::vector<int>& degree;  // indexed by node id
};

using Scorer = std::function<Key(const Candidate&)>;

double link_power(const Network& net, NodeId u, NodeId v) {
  if (net.has_geometry()) return std::pow(net.distance(u, v), net.alpha());
  return net.weight(u, v);
}

class TreeSearch {
 public:
  TreeSearch(const Network& net, const std::set<NodeId>& terminals, Scorer score)
      : net_(net), terminals_(terminals), score_(std::move(score)), degree_(net.size(), 0) {}

  OracleResult run() {
    if (terminals_.empty()) throw PreconditionError("no terminals");
    if (net_.size() > kOracleMaxNodes) {
      throw PreconditionError("exhaustive search refused above " +
                              std::to_string(kOracleMaxNodes) + " nodes");
    }
    if (!net_.connected()) throw PreconditionError("network is not connected");
    std::vector<NodeId> others;
    for (NodeId v = 0; v < net_.size(); ++v) {
      if (!terminals_.count(v)) others.push_back(v);
    }
    for (unsigned mask = 0; mask < (1u << others.size()); ++mask) {
      nodes_.assign(terminals_.begin(), terminals_.end());
      for (size_t i = 0; i < others.size(); ++i) {
        if (mask & (1u << i)) nodes_.push_back(others[i]);
      }
      std::sort(nodes_.begin(), nodes_.end());
      if (!induced_connected()) continue;
      graph_edges_.clear();
      for (NodeId u : nodes_) {
        for (const auto& nb : net_.neighbors(u)) {
          if (u < nb.id && std::binary_search(nodes_.begin(), nodes_.end(), nb.id)) {
            graph_edges_.emplace_back(u, nb.id);
          }
        }
      }
      std::sort(graph_edges_.begin(), graph_edges_.end());
      std::array<int, kOracleMaxNodes> parent{};
      for (int i = 0; i < kOracleMaxNodes; ++i) parent[i] = i;
      chosen_.clear();
      grow(0, parent);
    }
    if (!best_key_) throw AlgorithmError("no tree spans the terminals");
    OracleResult out;
    out.tree = MulticastTree(std::set<NodeId>(best_nodes_.begin(), best_nodes_.end()),
                             std::set<Edge>(best_edges_.begin(), best_edges_.end()));
    out.objective = (*best_key_)[0];
    out.enumerated = enumerated_;
    return out;
  }

 private:
  bool induced_connected() const {
    std::vector<char> seen(net_.size(), 0);
    std::vector<NodeId> stack{nodes_.front()};
    seen[nodes_.front()] = 1;
    size_t reached = 1;
    while (!stack.empty()) {
      NodeId x = stack.back();
      stack.pop_back();
      for (const auto& nb : net_.neighbors(x)) {
        if (!seen[nb.id] && std::binary_search(nodes_.begin(), nodes_.end(), nb.id)) {
          seen[nb.id] = 1;
          ++reached;
          stack.push_back(nb.id);
        }
      }
    }
    return reached == nodes_.size();
  }

  static int root(const std::array<int, kOracleMaxNodes>& parent, int x) {
    while (parent[x] != x) x = parent[x];
    return x;
  }

  void grow(size_t idx, std::array<int, kOracleMaxNodes> parent) {
    const size_t need = nodes_.size() - 1;
    if (chosen_.size() == need) {
      evaluate();
      return;
    }
    if (chosen_.size() + (graph_edges_.size() - idx) < need) return;
    const Edge& e = graph_edges_[idx];
    int ra = root(parent, e.a), rb = root(parent, e.b);
    if (ra != rb) {
      auto joined = parent;
      joined[std::max(ra, rb)] = std::min(ra, rb);
      chosen_.push_back(e);
      grow(idx + 1, joined);
      chosen_.pop_back();
    }
    grow(idx + 1, parent);
  }

  void evaluate() {
    for (NodeId v : nodes_) degree_[v] = 0;
    for (const auto& e : chosen_) {
      ++degree_[e.a];
      ++degree_[e.b];
    }
    if (nodes_.size() > 1) {
      for (NodeId v : nodes_) {
        if (degree_[v] == 1 && !terminals_.count(v)) return;
      }
    }
    ++enumerated_;
    Key key = score_(Candidate{nodes_, chosen_, degree_});
    if (!best_key_ || key < *best_key_ || (key == *best_key_ && chosen_ < best_edges_)) {
      best_key_ = key;
      best_edges_ = chosen_;
      best_nodes_ = nodes_;
    }
  }

  const Network& net_;
  const std::set<NodeId>& terminals_;
  Scorer score_;
  std::vector<int> degree_;
  std::vector<NodeId> nodes_;
  std::vector<Edge> graph_edges_;
  std::vector<Edge> chosen_;
  std::optional<Key> best_key_;
  std::vector<Edge> best_edges_;
  std::vector<NodeId> best_nodes_;
  long long enumerated_ = 0;
};

std::set<NodeId> member_set(const GroupSpec& group) {
  return {group.members().begin(), group.members().end()};
}

std::vector<double> broadcast_levels(const Network& net, const Candidate& c) {
  std::vector<double> lambda(net.size(), 0.0);
  for (const auto& e : c.edges) {
    double w = link_power(net, e.a, e.b);
    lambda[e.a] = std::max(lambda[e.a], w);
    lambda[e.b] = std::max(lambda[e.b], w);
  }
  return lambda;
}

}  // namespace

OracleResult brute_opt_tree(const Network& net, const GroupSpec& group, const EnergyParams& params,
                            PowerMode mode) {
  group.validate(net);
  const double k = static_cast<double>(group.k());
  auto terminals = member_set(group);
  TreeSearch search(net, terminals, [&](const Candidate& c) {
    std::vector<double> lambda;
    if (mode == PowerMode::Adjustable) lambda = broadcast_levels(net, c);
    double total = k * static_cast<double>(c.nodes.size() - 1) * params.eps_r;
    for (NodeId v : c.nodes) {
      double tx = mode == PowerMode::Fixed ? params.eps_s : lambda[v];
      if (c.degree[v] > 1) {
        total += k * tx;
      } else if (c.degree[v] == 1) {
        total += group.packets_of(v) * tx;
      }
    }
    return Key{total, 0.0};
  });
  return search.run();
}

OracleResult brute_min_internal_tree(const Network& net, const GroupSpec& group) {
  group.validate(net);
  auto terminals = member_set(group);
  TreeSearch search(net, terminals, [](const Candidate& c) {
    double internal = 0.0;
    for (NodeId v : c.nodes) internal += c.degree[v] > 1 ? 1.0 : 0.0;
    return Key{internal, static_cast<double>(c.nodes.size())};
  });
  return search.run();
}

OracleResult brute_min_theta_tree(const Network& net, const GroupSpec& group) {
  group.validate(net);
  auto terminals = member_set(group);
  TreeSearch search(net, terminals, [&net](const Candidate& c) {
    auto lambda = broadcast_levels(net, c);
    double theta = 0.0;
    for (NodeId v : c.nodes) {
      if (c.degree[v] > 1) theta += lambda[v];
    }
    return Key{theta, 0.0};
  });
  return search.run();
}

OracleResult brute_min_steiner(const Network& net, const std::set<NodeId>& terminals) {
  for (NodeId t : terminals) {
    if (!net.contains(t)) throw PreconditionError("terminal outside the network");
  }
  TreeSearch search(net, terminals, [&net](const Candidate& c) {
    double zeta = 0.0;
    for (const auto& e : c.edges) zeta += net.weight(e.a, e.b);
    return Key{zeta, 0.0};
  });
  return search.run();
}

OracleResult brute_min_guardian(const Network& net, const GroupSpec& group, GuardianPool pool) {
  group.validate(net);
  std::vector<NodeId> candidates;
  if (pool == GuardianPool::Buddies) {
    auto b = buddy_set(net, group);
    candidates.assign(b.begin(), b.end());
  } else {
    candidates = group.members();
  }
  const int n = static_cast<int>(candidates.size());
  if (n > kOracleMaxPool) {
    throw PreconditionError("guardian pool larger than " + std::to_string(kOracleMaxPool));
  }
  OracleResult out;
  // Subsets of each size in lexicographic order; the first cover wins.
  for (int size = 1; size <= n; ++size) {
    std::vector<int> pick(size);
    for (int i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      std::set<NodeId> chosen;
      for (int i : pick) chosen.insert(candidates[i]);
      ++out.enumerated;
      if (covers(net, group, chosen)) {
        out.nodes = chosen;
        out.objective = size;
        return out;
      }
      int i = size - 1;
      while (i >= 0 && pick[i] == n - size + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  throw AlgorithmError("candidate pool cannot cover the group");
}

}  // namespace megcom
