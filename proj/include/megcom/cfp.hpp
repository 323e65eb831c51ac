#pragma once

#include <cstdint>
#include <set>

#include "megcom/network.hpp"
#include "megcom/protocol.hpp"

namespace megcom {

struct CfpOptions {
  /// Compete against all neighbors, non-members included. Can stall.
  bool all_neighbors = false;
  KernelOptions kernel;
};

/// Member-only guardian selection: a member becomes a guardian once every
/// still-undecided member neighbor has a larger id.
ProtocolRun cfp_stage1(const Network& net, const ShortestPaths& paths, const GroupSpec& group,
                       std::uint64_t seed, const CfpOptions& options = {});

ProtocolRun run_cfp(const Network& net, const ShortestPaths& paths, const GroupSpec& group,
                    std::uint64_t seed, const CfpOptions& options = {});

/// No two nodes of `nodes` are adjacent.
bool independent(const Network& net, const std::set<NodeId>& nodes);

}  // namespace megcom
