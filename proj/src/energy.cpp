#include "megcom/energy.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace megcom {

namespace {

double link_power(const Network& net, NodeId u, NodeId v) {
  if (net.mode() == PowerMode::Fixed && net.has_geometry()) {
    return std::pow(net.distance(u, v), net.alpha());
  }
  return net.weight(u, v);
}

void check_inputs(const MulticastTree& tree, const Network& net, const GroupSpec& group) {
  group.validate(net);
  if (!tree.is_tree()) throw PreconditionError("not a tree");
  if (!tree.spans(group.members())) throw PreconditionError("tree does not span the group");
}

std::map<NodeId, double> broadcast_power(const MulticastTree& tree, const Network& net) {
  std::map<NodeId, double> lambda;
  for (NodeId v : tree.nodes()) lambda[v] = 0.0;
  for (const auto& e : tree.edges()) {
    double w = link_power(net, e.a, e.b);
    lambda[e.a] = std::max(lambda[e.a], w);
    lambda[e.b] = std::max(lambda[e.b], w);
  }
  return lambda;
}

}  // namespace

EnergyBreakdown psi(const MulticastTree& tree, const Network& net, const GroupSpec& group,
                    const EnergyParams& params, PowerMode mode) {
  check_inputs(tree, net, group);
  const double k = static_cast<double>(group.k());
  EnergyBreakdown out;
  std::map<NodeId, double> lambda;
  if (mode == PowerMode::Adjustable) lambda = broadcast_power(tree, net);
  auto tx = [&](NodeId v) { return mode == PowerMode::Fixed ? params.eps_s : lambda[v]; };

  for (NodeId v : tree.nodes()) {
    int deg = tree.degree(v);
    if (deg > 1) {
      out.tx_internal += k * tx(v);
    } else if (deg == 1) {
      out.tx_leaf += group.packets_of(v) * tx(v);
    }
    if (mode == PowerMode::Adjustable && lambda[v] < params.eps_r) out.rx_exceeds_tx = true;
  }
  out.rx_total = k * static_cast<double>(tree.nodes().size() - 1) * params.eps_r;
  out.total = out.tx_internal + out.tx_leaf + out.rx_total;
  return out;
}

double psi_flooding(const MulticastTree& tree, const Network& net, const GroupSpec& group,
                    const EnergyParams& params, PowerMode mode) {
  check_inputs(tree, net, group);
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const auto& e : tree.edges()) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::map<NodeId, double> tx_power;
  for (NodeId v : tree.nodes()) {
    if (mode == PowerMode::Fixed) {
      tx_power[v] = params.eps_s;
    } else {
      double best = 0.0;
      for (NodeId w : adj[v]) best = std::max(best, link_power(net, v, w));
      tx_power[v] = best;
    }
  }

  double total = 0.0;
  for (NodeId origin : group.members()) {
    for (int packet = 0; packet < group.packets_of(origin); ++packet) {
      std::set<NodeId> reached{origin};
      std::queue<NodeId> transmitters;
      transmitters.push(origin);
      while (!transmitters.empty()) {
        NodeId x = transmitters.front();
        transmitters.pop();
        total += tx_power[x];
        for (NodeId y : adj[x]) {
          if (!reached.insert(y).second) continue;
          total += params.eps_r;
          if (adj[y].size() > 1) transmitters.push(y);
        }
      }
    }
  }
  return total;
}

ThetaResult lambda_theta(const MulticastTree& tree, const Network& net) {
  ThetaResult out;
  out.lambda = broadcast_power(tree, net);
  for (const auto& e : tree.edges()) out.zeta += link_power(net, e.a, e.b);
  for (NodeId v : tree.internal()) out.theta += out.lambda[v];
  return out;
}

LowerBounds lower_bounds(const MulticastTree& tree, const GroupSpec& group,
                         const EnergyParams& params) {
  const double k = static_cast<double>(group.k());
  LowerBounds out;
  out.bound1 = k * (params.eps_s + (group.size() - 1) * params.eps_r);
  out.bound2 = static_cast<double>(tree.internal().size()) * (params.eps_s + params.eps_r) * k;
  return out;
}

}  // namespace megcom
