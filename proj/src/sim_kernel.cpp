#include "megcom/sim_kernel.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <sstream>

#include "megcom/rng.hpp"

namespace megcom {

const char* to_string(NodeState state) {
  switch (state) {
    case NodeState::Inactive: return "Inactive";
    case NodeState::Competing: return "Competing";
    case NodeState::Connecting: return "Connecting";
    case NodeState::Merging: return "Merging";
    case NodeState::Treed: return "Treed";
  }
  return "?";
}

const char* to_string(MsgKind kind) {
  switch (kind) {
    case MsgKind::Compete: return "Compete";
    case MsgKind::Decision: return "Decision";
    case MsgKind::Accept: return "Accept";
    case MsgKind::Ack: return "ACK";
    case MsgKind::CntReq: return "CNTReq";
    case MsgKind::Query: return "Query";
    case MsgKind::Report: return "Report";
  }
  return "?";
}

namespace {

NodeState state_from_string(const std::string& s) {
  for (auto st : {NodeState::Inactive, NodeState::Competing, NodeState::Connecting,
                  NodeState::Merging, NodeState::Treed}) {
    if (s == to_string(st)) return st;
  }
  throw PreconditionError("unknown state " + s);
}

}  // namespace

std::string Message::payload() const {
  std::ostringstream out;
  out << "id=" << id;
  switch (kind) {
    case MsgKind::Compete:
      if (stage == 1 && epoch >= 0) out << " ct=" << ct << " epoch=" << epoch;
      break;
    case MsgKind::Ack: out << " state=" << to_string(state); break;
    case MsgKind::CntReq:
      out << " ld=" << ld << " requester=" << requester << " edge=" << edge.a << '-' << edge.b;
      break;
    case MsgKind::Accept:
      if (stage == 2) out << " ld=" << ld << " edge=" << edge.a << '-' << edge.b;
      break;
    case MsgKind::Query: out << " leader=" << ld << " q=" << query; break;
    case MsgKind::Report: out << " q=" << query << " n=" << nodes.size(); break;
    case MsgKind::Decision: break;
  }
  return out.str();
}

class Kernel {
 public:
  Kernel(const Network& net, const ShortestPaths& paths, std::vector<NodeRuntime> nodes,
         const KernelOptions& options)
      : net_(net), paths_(paths), options_(options), nodes_(std::move(nodes)) {}

  SimOutcome run(Protocol& protocol, std::uint64_t seed);
  bool probe(Protocol& protocol, const SimOutcome& outcome);

 private:
  friend class Context;

  struct Event {
    long long t;
    int cls;  // deliveries before scans at equal times
    long long seq;
    NodeId node;
    long long msg;  // index into messages_, -1 for a scan
    bool operator>(const Event& o) const {
      if (t != o.t) return t > o.t;
      if (cls != o.cls) return cls > o.cls;
      return seq > o.seq;
    }
  };

  void trace(const std::string& kind, const std::string& a, const std::string& b,
             const std::string& payload) {
    if (!options_.record_trace) return;
    std::ostringstream line;
    line << "t=" << now_ << ' ' << kind << ' ' << a << ' ' << b;
    if (!payload.empty()) line << ' ' << payload;
    trace_.push_back(line.str());
  }

  void enqueue_delivery(Message msg, int delay) {
    auto key = std::make_pair(msg.src, msg.dst);
    long long at = std::max(now_ + delay, fifo_[key]);
    fifo_[key] = at;
    NodeId dst = msg.dst;
    messages_.push_back(std::move(msg));
    queue_.push({at, 0, seq_++, dst, static_cast<long long>(messages_.size() - 1)});
    ++in_flight_;
  }

  void charge(const Message& msg, int units) {
    if (msg.stage == 1) {
      counters_.messages_stage1 += units;
    } else {
      counters_.messages_stage2 += units;
    }
  }

  const Network& net_;
  const ShortestPaths& paths_;
  KernelOptions options_;
  std::vector<NodeRuntime> nodes_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::deque<Message> messages_;
  std::map<std::pair<NodeId, NodeId>, long long> fifo_;
  std::set<Edge> guard_edges_;
  std::set<Edge> links_;
  std::map<NodeId, std::set<NodeId>> link_adj_;
  std::vector<std::string> trace_;
  SimCounters counters_;
  long long now_ = 0;
  long long seq_ = 0;
  long long in_flight_ = 0;
  long long last_stage1_ = -1;
  bool probing_ = false;
  bool probe_sent_ = false;
};

long long Context::now() const { return kernel_.now_; }
int Context::period() const { return kernel_.options_.period; }
const Network& Context::net() const { return kernel_.net_; }
const ShortestPaths& Context::paths() const { return kernel_.paths_; }
const NodeRuntime& Context::view(NodeId v) const { return kernel_.nodes_.at(v); }
int Context::node_count() const { return static_cast<int>(kernel_.nodes_.size()); }

void Context::send(NodeId dst, Message msg, int hops) {
  sent_ = true;
  if (hops < 0) hops = kernel_.paths_.hops(self_, dst);
  hops = std::max(hops, 1);
  msg.src = self_;
  msg.dst = dst;
  if (kernel_.probing_) {
    kernel_.probe_sent_ = true;
    return;
  }
  kernel_.charge(msg, hops);
  kernel_.trace("Send", std::to_string(self_), std::to_string(dst),
                std::string(to_string(msg.kind)) + " stage=" + std::to_string(msg.stage) +
                    " units=" + std::to_string(hops) + ' ' + msg.payload());
  kernel_.enqueue_delivery(std::move(msg), hops);
}

void Context::broadcast(std::span<const NodeId> dsts, const Message& msg, int units) {
  if (dsts.empty()) return;
  sent_ = true;
  if (kernel_.probing_) {
    kernel_.probe_sent_ = true;
    return;
  }
  kernel_.charge(msg, units);
  kernel_.trace("Send", std::to_string(self_), "*",
                std::string(to_string(msg.kind)) + " stage=" + std::to_string(msg.stage) +
                    " units=" + std::to_string(units) + ' ' + msg.payload());
  for (NodeId dst : dsts) {
    Message copy = msg;
    copy.src = self_;
    copy.dst = dst;
    kernel_.enqueue_delivery(std::move(copy), std::max(1, kernel_.paths_.hops(self_, dst)));
  }
}

void Context::mark_guard_edge(const Edge& e) {
  sent_ = true;
  if (kernel_.probing_) return;
  if (kernel_.guard_edges_.insert(e).second) {
    kernel_.trace("Mark", std::to_string(e.a), std::to_string(e.b), "guard");
  }
}

bool Context::add_link(const Edge& e) {
  sent_ = true;
  if (kernel_.probing_) return false;
  if (!kernel_.links_.insert(e).second) return false;
  kernel_.link_adj_[e.a].insert(e.b);
  kernel_.link_adj_[e.b].insert(e.a);
  ++kernel_.counters_.rounds_stage2;
  return true;
}

const std::set<NodeId>& Context::links_of(NodeId v) const {
  static const std::set<NodeId> kEmpty;
  auto it = kernel_.link_adj_.find(v);
  return it == kernel_.link_adj_.end() ? kEmpty : it->second;
}

void Context::stage1_progress() {
  if (!kernel_.probing_) kernel_.last_stage1_ = kernel_.now_;
}

void Context::log(const std::string& kind, NodeId a, NodeId b, const std::string& payload) {
  if (!kernel_.probing_) kernel_.trace(kind, std::to_string(a), std::to_string(b), payload);
}

SimOutcome Kernel::run(Protocol& protocol, std::uint64_t seed) {
  const int period = options_.period;
  if (period < 3) throw PreconditionError("scan period must be at least 3 time units");
  // Phases stop two units short of the period so a two-hop message sent in
  // one period always lands before any Scan of the next.
  auto rng = make_rng(seed, Stream::ScanPhase);
  std::uniform_int_distribution<int> phase(0, period - 2);
  for (const auto& node : nodes_) queue_.push({phase(rng), 1, seq_++, node.id, -1});

  long long last_activity = 0;
  long long events = 0;
  while (!queue_.empty()) {
    Event ev = queue_.top();
    if (in_flight_ == 0 && ev.t > last_activity + period) break;
    queue_.pop();
    if (++events > options_.max_events) {
      throw LivelockError("event budget exhausted at t=" + std::to_string(ev.t) +
                              " without quiescence",
                          std::move(trace_));
    }
    now_ = ev.t;
    NodeRuntime& node = nodes_.at(ev.node);
    NodeRuntime before = node;
    Context ctx(*this, node.id);
    if (ev.msg < 0) {
      protocol.on_scan(node, ctx);
      queue_.push({ev.t + period, 1, seq_++, ev.node, -1});
    } else {
      --in_flight_;
      const Message& msg = messages_[ev.msg];
      trace("Recv", std::to_string(msg.src), std::to_string(msg.dst),
            std::string(to_string(msg.kind)) + ' ' + msg.payload());
      protocol.on_message(node, msg, ctx);
    }
    bool changed = !(before == node);
    if (changed && (before.state != node.state || before.gd != node.gd || before.ld != node.ld)) {
      trace("State", std::to_string(node.id), std::to_string(node.id),
            std::string(to_string(node.state)) + " gd=" + std::to_string(node.gd) +
                " ld=" + std::to_string(node.ld));
    }
    if (changed || ctx.sent_) last_activity = now_;
  }

  SimOutcome out;
  counters_.rounds_stage1 = last_stage1_ < 0 ? 0 : static_cast<int>(last_stage1_ / period) + 1;
  out.nodes = std::move(nodes_);
  out.guard_edges = std::move(guard_edges_);
  out.links = std::move(links_);
  out.counters = counters_;
  out.trace = std::move(trace_);
  out.end_time = now_;
  return out;
}

bool Kernel::probe(Protocol& protocol, const SimOutcome& outcome) {
  probing_ = true;
  now_ = outcome.end_time;
  for (const auto& e : outcome.links) {
    link_adj_[e.a].insert(e.b);
    link_adj_[e.b].insert(e.a);
  }
  for (size_t v = 0; v < nodes_.size(); ++v) {
    NodeRuntime copy = nodes_[v];
    probe_sent_ = false;
    Context ctx(*this, copy.id);
    protocol.on_scan(copy, ctx);
    if (probe_sent_ || !(copy == nodes_[v])) return false;
  }
  return true;
}

SimOutcome run_protocol(const Network& net, const ShortestPaths& paths,
                        std::vector<NodeRuntime> initial, Protocol& protocol, std::uint64_t seed,
                        const KernelOptions& options) {
  if (static_cast<int>(initial.size()) != net.size()) {
    throw PreconditionError("one runtime per network node required");
  }
  Kernel kernel(net, paths, std::move(initial), options);
  return kernel.run(protocol, seed);
}

bool quiescent(const Network& net, const ShortestPaths& paths, const SimOutcome& outcome,
               Protocol& protocol) {
  Kernel kernel(net, paths, outcome.nodes, KernelOptions{});
  return kernel.probe(protocol, outcome);
}

std::map<NodeId, ReplayedState> replay_states(const std::vector<std::string>& trace,
                                              const std::vector<NodeRuntime>& initial) {
  std::map<NodeId, ReplayedState> states;
  for (const auto& node : initial) states[node.id] = {node.state, node.gd, node.ld};
  for (const auto& line : trace) {
    std::istringstream fields(line);
    std::string time, kind, state, gd, ld;
    NodeId a, b;
    if (!(fields >> time >> kind) || kind != "State") continue;
    fields >> a >> b >> state >> gd >> ld;
    ReplayedState& st = states[a];
    st.state = state_from_string(state);
    st.gd = std::stoi(gd.substr(3));
    st.ld = std::stoi(ld.substr(3));
  }
  return states;
}

MetricsReport collect_metrics(const SimOutcome& outcome, const Network& net, int members,
                              double c1, double c2) {
  if (outcome.trace.empty()) throw PreconditionError("outcome has no trace to recount");
  MetricsReport report;
  report.counters = outcome.counters;
  for (const auto& line : outcome.trace) {
    std::istringstream fields(line);
    std::string time, kind, a, b, msg, stage, units;
    if (!(fields >> time >> kind) || kind != "Send") continue;
    fields >> a >> b >> msg >> stage >> units;
    long long u = std::stoll(units.substr(6));
    if (stage == "stage=1") {
      report.recounted_stage1 += u;
    } else {
      report.recounted_stage2 += u;
    }
  }
  auto metrics = compute_metrics(net);
  report.max_degree = metrics.max_degree;
  report.nodes = net.size();
  report.members = members;
  report.ceiling_stage1 = c1 * metrics.max_degree * net.size();
  report.ceiling_stage2 = c2 * members * net.size();
  report.stage1_within = outcome.counters.messages_stage1 <= report.ceiling_stage1;
  report.stage2_within = outcome.counters.messages_stage2 <= report.ceiling_stage2;
  report.rounds1_within = outcome.counters.rounds_stage1 <= 2 * metrics.max_degree;
  return report;
}

}  // namespace megcom
