#pragma once

#include <cstdint>
#include <set>

#include "megcom/network.hpp"
#include "megcom/sim_kernel.hpp"
#include "megcom/tree.hpp"

namespace megcom {

/// Expands closure edges into their canonical shortest paths, keeps a
/// minimum spanning tree of the union (ties by endpoint ids) and prunes
/// leaves outside `terminals`.
MulticastTree assemble_steiner(const ShortestPaths& paths, const std::set<Edge>& closure_edges,
                               const std::set<NodeId>& terminals);

/// Kruskal on the metric closure of `terminals`, keyed by
/// (path cost, smaller endpoint, larger endpoint).
std::set<Edge> closure_mst(const ShortestPaths& paths, const std::set<NodeId>& terminals);

/// Kou-Markowsky-Berman 2-approximate Steiner tree.
MulticastTree kmb_centralized(const ShortestPaths& paths, const std::set<NodeId>& terminals);

struct DistributedSteiner {
  MulticastTree tree;
  SimOutcome outcome;
};

/// Fragment merging over the closure of `terminals`, run on the kernel with
/// every terminal starting as its own fragment.
DistributedSteiner kruskal_sph_distributed(const Network& net, const ShortestPaths& paths,
                                           const std::set<NodeId>& terminals, std::uint64_t seed,
                                           const KernelOptions& options = {});

/// Shortest-path tree from a member drawn uniformly at random.
MulticastTree spt_baseline(const ShortestPaths& paths, const GroupSpec& group, std::uint64_t seed);

/// Distributed merging applied to M directly, on d^alpha link costs.
DistributedSteiner cap_tree(const Network& net, const ShortestPaths& paths, const GroupSpec& group,
                            std::uint64_t seed, const KernelOptions& options = {});

MulticastTree prune_non_member_leaves(const MulticastTree& tree, const GroupSpec& group);

}  // namespace megcom
