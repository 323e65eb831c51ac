#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "megcom/network.hpp"
#include "megcom/sim_kernel.hpp"
#include "megcom/tree.hpp"

namespace megcom {

enum class Stage1 {
  None,  // every member is its own guardian (adjustable-power variant)
  Lfp,   // largest-first guardian competition, guardians may be non-members
  Cfp,   // smallest-id-first competition among members only
};

struct ProtocolConfig {
  Stage1 stage1 = Stage1::Lfp;
  bool run_stage2 = true;
  /// LFP: a member counts itself when computing ct.
  bool self_count = true;
  /// CFP: compete against every neighbor instead of member neighbors only.
  /// This variant can stall forever and exists to exhibit that.
  bool cfp_all_neighbors = false;
};

/// Guardian selection followed by fragment merging over the metric closure
/// of the guardian set. Merging follows mutual minimum outgoing edges, which
/// reproduces Kruskal on the closure edges.
class MegcomProtocol : public Protocol {
 public:
  MegcomProtocol(const Network& net, const GroupSpec& group, ProtocolConfig config);

  void on_scan(NodeRuntime& self, Context& ctx) override;
  void on_message(NodeRuntime& self, const Message& msg, Context& ctx) override;

  std::vector<NodeRuntime> initial_state() const;
  const ProtocolConfig& config() const { return config_; }

 private:
  void lfp_scan(NodeRuntime& self, Context& ctx);
  void lfp_message(NodeRuntime& self, const Message& msg, Context& ctx);
  void cfp_scan(NodeRuntime& self, Context& ctx);
  void cfp_message(NodeRuntime& self, const Message& msg, Context& ctx);
  void cfp_try_join(NodeRuntime& self, Context& ctx);
  void cfp_leave_inactive(NodeRuntime& self, Context& ctx);

  bool stage1_done(const Context& ctx) const;
  void stage2_scan(NodeRuntime& self, Context& ctx);
  void stage2_message(NodeRuntime& self, const Message& msg, Context& ctx);
  void advance_leader(NodeRuntime& self, Context& ctx);
  void handle_request(NodeRuntime& self, const Message& msg, Context& ctx);
  void resolve_merge(NodeRuntime& self, NodeId other_ld, Context& ctx);
  void send_over_link(NodeId from, NodeId to, Message msg, Context& ctx) const;

  const Network& net_;
  GroupSpec group_;
  ProtocolConfig config_;
  std::vector<std::vector<NodeId>> nb_;
  std::vector<std::vector<NodeId>> nb2_;
};

/// Outcome of guardian selection.
struct GuardianAssignment {
  std::set<NodeId> guardians;           // C
  std::map<NodeId, NodeId> guarded;     // member -> its guardian (itself if a guardian)
  std::set<Edge> guard_edges;           // (member, guardian), none for self-guarded members
  bool operator==(const GuardianAssignment&) const = default;
};

/// Reads the assignment off the final node states. Throws LivelockError if a
/// member was never guarded.
GuardianAssignment extract_assignment(const SimOutcome& outcome, const GroupSpec& group);

/// Steiner tree over the guardians plus the guard edges of members not
/// already on it, with non-member leaves pruned.
MulticastTree compose_tree(const GuardianAssignment& assignment, const MulticastTree& steiner_tree,
                           const GroupSpec& group);

struct ProtocolRun {
  GuardianAssignment assignment;
  MulticastTree steiner;  // over the guardians; empty when stage 2 is skipped
  MulticastTree tree;     // spanning M; empty when stage 2 is skipped
  SimOutcome outcome;
};

ProtocolRun run_megcom(const Network& net, const ShortestPaths& paths, const GroupSpec& group,
                       std::uint64_t seed, const ProtocolConfig& config,
                       const KernelOptions& options = {});

}  // namespace megcom
