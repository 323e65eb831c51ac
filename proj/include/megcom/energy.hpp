#pragma once

#include <map>

#include "megcom/network.hpp"
#include "megcom/tree.hpp"

namespace megcom {

/// Session energy of one multicast tree, split by where it is spent.
struct EnergyBreakdown {
  double tx_internal = 0.0;
  double tx_leaf = 0.0;
  double rx_total = 0.0;
  double total = 0.0;
  /// Adjustable mode only: some tree node broadcasts below eps_r, which the
  /// receive-energy bound assumes never happens.
  bool rx_exceeds_tx = false;
};

/// Closed-form session energy.
///
/// Fixed mode:      k*|in|*eps_s + sum_{leaf} p*eps_s + k*(|nd|-1)*eps_r
/// Adjustable mode: k*sum_{in} lambda + sum_{leaf} p*lambda + k*(|nd|-1)*eps_r
///
/// Each transmitting node broadcasts once per packet; in adjustable mode it
/// does so at lambda(u,T), the power needed to reach its farthest tree
/// neighbor. Non-member nodes carry p = 0.
EnergyBreakdown psi(const MulticastTree& tree, const Network& net, const GroupSpec& group,
                    const EnergyParams& params, PowerMode mode);

/// Reference evaluation that floods every packet over the tree one at a time
/// and adds up the individual transmit and receive events.
double psi_flooding(const MulticastTree& tree, const Network& net, const GroupSpec& group,
                    const EnergyParams& params, PowerMode mode);

struct ThetaResult {
  std::map<NodeId, double> lambda;  // lambda(u,T)
  double theta = 0.0;               // sum of lambda over internal nodes
  double zeta = 0.0;                // sum of edge weights
};

/// lambda/Theta/zeta under d^alpha link costs.
ThetaResult lambda_theta(const MulticastTree& tree, const Network& net);

struct LowerBounds {
  double bound1 = 0.0;  // k * (eps_s + (|M|-1) * eps_r)
  double bound2 = 0.0;  // |in(T)| * (eps_s + eps_r) * k
};

/// Fixed-mode lower bounds on the session energy of any tree spanning M.
LowerBounds lower_bounds(const MulticastTree& tree, const GroupSpec& group,
                         const EnergyParams& params);

}  // namespace megcom
