#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "megcom/network.hpp"
#include "megcom/types.hpp"

namespace megcom {

enum class NodeState { Inactive, Competing, Connecting, Merging, Treed };
const char* to_string(NodeState state);

enum class MsgKind { Compete, Decision, Accept, Ack, CntReq, Query, Report };
const char* to_string(MsgKind kind);

/// One protocol message. Which payload fields are meaningful depends on kind.
struct Message {
  MsgKind kind = MsgKind::Compete;
  int stage = 1;
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  NodeId id = kNoNode;  // sender id carried in every header
  int ct = 0;           // Compete (LFP)
  int epoch = 0;        // Compete (LFP): scan period the count was taken in
  NodeId ld = kNoNode;  // CntReq / Accept (stage 2)
  NodeState state = NodeState::Inactive;  // Ack
  Edge edge;                              // CntReq / Accept (stage 2): closure edge
  NodeId requester = kNoNode;             // CntReq: issuing fragment leader
  int query = 0;                          // Query / Report: Discover sequence
  std::vector<NodeId> nodes;              // Report: terminals in the subtree

  std::string payload() const;
  bool operator==(const Message&) const = default;
};

/// Per-node protocol variables. Everything a handler may touch lives here.
struct NodeRuntime {
  NodeId id = kNoNode;
  NodeState state = NodeState::Inactive;
  NodeId gd = kNoNode;
  NodeId ld = kNoNode;
  std::optional<Edge> prefer;
  std::set<NodeId> S;
  int ct = 0;
  std::set<NodeId> path;          // terminals whose shortest path is cached
  std::set<Edge> marked_edges;    // guard edges this node marked
  std::set<NodeId> nb_working;    // CFP working neighbor list

  // Guardian competition.
  int epoch = -1;
  std::map<NodeId, std::pair<int, int>> competes;  // sender -> (epoch, ct)
  std::set<NodeId> accepted_from;
  std::set<NodeId> accepted_to;

  // Fragment merging.
  bool s2_started = false;
  bool need_discover = false;
  bool discovering = false;
  int query_seq = 0;
  NodeId query_leader = kNoNode;
  int query_id = 0;
  NodeId query_parent = kNoNode;
  int awaiting = 0;
  std::set<NodeId> collected;
  std::vector<Message> pending;

  bool operator==(const NodeRuntime&) const = default;
};

struct KernelOptions {
  int period = 10;
  long long max_events = 10'000'000;
  bool record_trace = true;
};

struct SimCounters {
  int rounds_stage1 = 0;
  int rounds_stage2 = 0;
  long long messages_stage1 = 0;
  long long messages_stage2 = 0;
};

struct SimOutcome {
  std::vector<NodeRuntime> nodes;
  std::set<Edge> guard_edges;  // stage-1 member-guardian edges
  std::set<Edge> links;        // stage-2 closure edges joined by mutual preference
  SimCounters counters;
  std::vector<std::string> trace;
  long long end_time = 0;
};

/// Raised when a run exceeds its event budget without reaching quiescence.
class LivelockError : public AlgorithmError {
 public:
  LivelockError(const std::string& what, std::vector<std::string> trace)
      : AlgorithmError(what), trace_(std::move(trace)) {}
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  std::vector<std::string> trace_;
};

class Kernel;

/// What a handler may observe and do while processing one event.
class Context {
 public:
  long long now() const;
  int period() const;
  const Network& net() const;
  const ShortestPaths& paths() const;
  /// Read-only snapshot of another node, standing in for the neighbor and
  /// routing-table knowledge the protocol assumes.
  const NodeRuntime& view(NodeId v) const;
  int node_count() const;

  /// Unicast over `hops` hops (default: shortest hop distance).
  void send(NodeId dst, Message msg, int hops = -1);
  /// Local broadcast to `dsts`; charged `units` once, each copy delayed by
  /// its hop distance.
  void broadcast(std::span<const NodeId> dsts, const Message& msg, int units);

  void mark_guard_edge(const Edge& e);
  /// Records a closure edge. Returns false if it was already present.
  bool add_link(const Edge& e);
  const std::set<NodeId>& links_of(NodeId v) const;

  /// A stage-1 coverage change happened now.
  void stage1_progress();
  void log(const std::string& kind, NodeId a, NodeId b, const std::string& payload);

 private:
  friend class Kernel;
  Context(Kernel& kernel, NodeId self) : kernel_(kernel), self_(self) {}
  Kernel& kernel_;
  NodeId self_;
  bool sent_ = false;
};

/// Handlers for one protocol. They may only modify the node passed in; all
/// other effects go through the Context.
class Protocol {
 public:
  virtual ~Protocol() = default;
  virtual void on_scan(NodeRuntime& self, Context& ctx) = 0;
  virtual void on_message(NodeRuntime& self, const Message& msg, Context& ctx) = 0;
};

/// Single-threaded deterministic event loop. Every node runs Scan once per
/// period at a seeded phase offset; messages arrive after one time unit per
/// hop, FIFO per ordered node pair. The run ends once no message is in
/// flight and a full period of Scans has changed nothing.
SimOutcome run_protocol(const Network& net, const ShortestPaths& paths,
                        std::vector<NodeRuntime> initial, Protocol& protocol,
                        std::uint64_t seed, const KernelOptions& options = {});

/// Re-fires every node's Scan against the final state. True if nothing
/// changes and nothing is sent.
bool quiescent(const Network& net, const ShortestPaths& paths, const SimOutcome& outcome,
               Protocol& protocol);

/// Final (state, gd, ld) per node, rebuilt from the State lines of a trace.
struct ReplayedState {
  NodeState state = NodeState::Inactive;
  NodeId gd = kNoNode;
  NodeId ld = kNoNode;
  bool operator==(const ReplayedState&) const = default;
};
std::map<NodeId, ReplayedState> replay_states(const std::vector<std::string>& trace,
                                              const std::vector<NodeRuntime>& initial);

struct MetricsReport {
  SimCounters counters;
  long long recounted_stage1 = 0;  // message units re-added from the trace
  long long recounted_stage2 = 0;
  int max_degree = 0;
  int nodes = 0;
  int members = 0;
  double ceiling_stage1 = 0.0;  // c1 * Delta * |V|
  double ceiling_stage2 = 0.0;  // c2 * |M| * |V|
  bool stage1_within = false;
  bool stage2_within = false;
  bool rounds1_within = false;  // rounds_stage1 <= 2 * Delta
};

MetricsReport collect_metrics(const SimOutcome& outcome, const Network& net, int members,
                              double c1 = 4.0, double c2 = 4.0);

}  // namespace megcom
