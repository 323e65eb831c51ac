#pragma once

#include <cstdint>
#include <set>

#include "megcom/network.hpp"
#include "megcom/protocol.hpp"
#include "megcom/tree.hpp"

namespace megcom {

/// B: nodes with at least one member neighbor.
std::set<NodeId> buddy_set(const Network& net, const GroupSpec& group);

/// Every member is in nb+(c) for some c in `guardians`.
bool covers(const Network& net, const GroupSpec& group, const std::set<NodeId>& guardians);

struct LfpOptions {
  bool self_count = true;
  KernelOptions kernel;
};

/// Guardian competition only; the assignment's guardians are the Connecting
/// nodes at quiescence.
ProtocolRun lfp_stage1(const Network& net, const ShortestPaths& paths, const GroupSpec& group,
                       std::uint64_t seed, const LfpOptions& options = {});

/// Both stages and the composed tree T_A.
ProtocolRun run_lfp(const Network& net, const ShortestPaths& paths, const GroupSpec& group,
                    std::uint64_t seed, const LfpOptions& options = {});

/// Sequential greedy set cover over the buddy set with the same counting
/// and tie-break rules as the distributed competition.
GuardianAssignment greedy_guardian_cover(const Network& net, const GroupSpec& group,
                                         bool self_count = true);

/// A live multicast tree with its guardian bookkeeping.
struct MaintainedTree {
  GroupSpec group;
  GuardianAssignment assignment;
  MulticastTree tree;
};

enum class MaintenanceAction {
  AttachedToGuardian,  // one guard edge to a neighboring guardian
  AlreadyOnTree,       // the node already relays for the tree
  PathToGuardian,      // new guardian joined by a shortest path
  RemovedLeaf,         // leaf dropped with its edge
  Remerged,            // interior node removed and fragments reconnected
};
const char* to_string(MaintenanceAction action);

struct MaintenanceReport {
  MaintenanceAction action = MaintenanceAction::AttachedToGuardian;
  /// A fresh greedy cover would use fewer guardians than the maintained
  /// assignment; re-running guardian selection is up to the caller.
  bool cover_degraded = false;
};

MaintenanceReport member_join(MaintainedTree& state, const Network& net,
                              const ShortestPaths& paths, NodeId new_member);

/// The leaving node stops relaying too, so fragments are reconnected over
/// paths that avoid it.
MaintenanceReport member_leave(MaintainedTree& state, const Network& net, NodeId member);

}  // namespace megcom
