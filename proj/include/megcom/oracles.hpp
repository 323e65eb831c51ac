#pragma once

#include <set>

#include "megcom/energy.hpp"
#include "megcom/network.hpp"
#include "megcom/tree.hpp"

namespace megcom {

inline constexpr int kOracleMaxNodes = 10;
inline constexpr int kOracleMaxPool = 20;

struct OracleResult {
  MulticastTree tree;          // tree oracles
  std::set<NodeId> nodes;      // set oracles (guardians)
  double objective = 0.0;
  long long enumerated = 0;    // candidates examined
};

/// Exhaustive search over every connected node set containing the
/// terminals and every spanning tree of it. Trees with a leaf outside the
/// terminals are skipped: every objective here is non-increasing under
/// removing such a leaf, so the pruned tree is always also a candidate.
/// Ties go to the lexicographically smallest edge list.
OracleResult brute_opt_tree(const Network& net, const GroupSpec& group, const EnergyParams& params,
                            PowerMode mode);

/// Minimum |in(T)|; ties by fewer nodes, then edge list.
OracleResult brute_min_internal_tree(const Network& net, const GroupSpec& group);

/// Minimum Theta(T) under d^alpha link costs.
OracleResult brute_min_theta_tree(const Network& net, const GroupSpec& group);

enum class GuardianPool { Buddies, Members };

/// Smallest subset of the pool whose closed neighborhoods cover M; ties by
/// lexicographic id set.
OracleResult brute_min_guardian(const Network& net, const GroupSpec& group, GuardianPool pool);

/// Minimum total link weight tree spanning `terminals`.
OracleResult brute_min_steiner(const Network& net, const std::set<NodeId>& terminals);

}  // namespace megcom
