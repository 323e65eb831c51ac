#include "megcom/protocol.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "megcom/steiner.hpp"

namespace megcom {

namespace {

bool unguarded(NodeState s) { return s == NodeState::Inactive || s == NodeState::Competing; }

bool is_leader(const NodeRuntime& n) {
  return n.s2_started && (n.state == NodeState::Connecting || n.state == NodeState::Merging);
}

}  // namespace

MegcomProtocol::MegcomProtocol(const Network& net, const GroupSpec& group, ProtocolConfig config)
    : net_(net), group_(group), config_(config) {
  nb_.resize(net.size());
  nb2_.resize(net.size());
  for (NodeId v = 0; v < net.size(); ++v) {
    for (const auto& nb : net.neighbors(v)) nb_[v].push_back(nb.id);
    nb2_[v] = net.two_hop(v);
  }
}

std::vector<NodeRuntime> MegcomProtocol::initial_state() const {
  std::vector<NodeRuntime> nodes(net_.size());
  for (NodeId v = 0; v < net_.size(); ++v) {
    NodeRuntime& n = nodes[v];
    n.id = v;
    if (config_.stage1 == Stage1::None && group_.is_member(v)) {
      n.state = NodeState::Connecting;
      n.gd = v;
      n.ld = v;
    }
    if (config_.stage1 == Stage1::Cfp && group_.is_member(v)) {
      for (NodeId u : nb_[v]) {
        if (config_.cfp_all_neighbors || group_.is_member(u)) n.nb_working.insert(u);
      }
    }
  }
  return nodes;
}

void MegcomProtocol::on_scan(NodeRuntime& self, Context& ctx) {
  switch (config_.stage1) {
    case Stage1::Lfp: lfp_scan(self, ctx); break;
    case Stage1::Cfp: cfp_scan(self, ctx); break;
    case Stage1::None: break;
  }
  if (config_.run_stage2) stage2_scan(self, ctx);
}

void MegcomProtocol::on_message(NodeRuntime& self, const Message& msg, Context& ctx) {
  if (msg.stage == 2) {
    stage2_message(self, msg, ctx);
  } else if (config_.stage1 == Stage1::Lfp) {
    lfp_message(self, msg, ctx);
  } else if (config_.stage1 == Stage1::Cfp) {
    cfp_message(self, msg, ctx);
  }
}

// ---------------------------------------------------------------- LFP

void MegcomProtocol::lfp_scan(NodeRuntime& self, Context& ctx) {
  const int round = static_cast<int>(ctx.now() / ctx.period());
  const NodeId v = self.id;
  const bool member = group_.is_member(v);

  if (self.state == NodeState::Competing && self.epoch < round) {
    bool win = true;
    for (NodeId u : nb2_[v]) {
      auto it = self.competes.find(u);
      if (it == self.competes.end() || it->second.first != self.epoch) continue;
      int c = it->second.second;
      if (c > self.ct || (c == self.ct && u < v)) {
        win = false;
        break;
      }
    }
    std::set<NodeId> covered;
    if (win) {
      if (member) covered.insert(v);
      for (NodeId u : nb_[v]) {
        if (group_.is_member(u) && unguarded(ctx.view(u).state)) covered.insert(u);
      }
    }
    self.ct = 0;
    if (!covered.empty()) {
      self.state = NodeState::Connecting;
      self.gd = v;
      self.ld = v;
      self.S = covered;
      std::vector<NodeId> dsts;
      for (NodeId u : covered) {
        if (u != v) dsts.push_back(u);
      }
      Message m;
      m.kind = MsgKind::Decision;
      m.id = v;
      ctx.broadcast(dsts, m, 1);
      ctx.stage1_progress();
      return;
    }
    // Losers recount on their next Scan, once this period's Decisions have landed.
    self.state = NodeState::Inactive;
    return;
  }

  if (self.state != NodeState::Inactive) return;
  int ct = 0;
  bool buddy = false;
  for (NodeId u : nb_[v]) {
    if (!group_.is_member(u)) continue;
    buddy = true;
    if (unguarded(ctx.view(u).state)) ++ct;
  }
  if (!buddy) return;
  if (member && config_.self_count) ++ct;
  if (ct == 0 && !member) return;
  self.state = NodeState::Competing;
  self.ct = ct;
  self.epoch = round;
  Message m;
  m.kind = MsgKind::Compete;
  m.id = v;
  m.ct = ct;
  m.epoch = round;
  ctx.broadcast(nb2_[v], m, 2);
}

void MegcomProtocol::lfp_message(NodeRuntime& self, const Message& msg, Context& ctx) {
  if (msg.kind == MsgKind::Compete) {
    self.competes[msg.src] = {msg.epoch, msg.ct};
  } else if (msg.kind == MsgKind::Decision) {
    if (!unguarded(self.state)) return;
    self.state = NodeState::Treed;
    self.gd = msg.src;
    self.ct = 0;
    self.marked_edges.insert(Edge(self.id, msg.src));
    ctx.mark_guard_edge(Edge(self.id, msg.src));
    ctx.stage1_progress();
  }
}

// ---------------------------------------------------------------- CFP

void MegcomProtocol::cfp_scan(NodeRuntime& self, Context& ctx) {
  if (!group_.is_member(self.id) || self.state != NodeState::Inactive) return;
  cfp_try_join(self, ctx);
  if (self.state != NodeState::Inactive || self.epoch >= 0) return;
  // One Compete per node; neighbors remember it and answer once they can.
  self.epoch = static_cast<int>(ctx.now() / ctx.period());
  std::vector<NodeId> dsts(self.nb_working.begin(), self.nb_working.end());
  Message m;
  m.kind = MsgKind::Compete;
  m.id = self.id;
  m.epoch = -1;
  ctx.broadcast(dsts, m, 1);
}

void MegcomProtocol::cfp_try_join(NodeRuntime& self, Context& ctx) {
  if (self.state != NodeState::Inactive) return;
  if (!std::includes(self.accepted_from.begin(), self.accepted_from.end(),
                     self.nb_working.begin(), self.nb_working.end())) {
    return;
  }
  self.state = NodeState::Connecting;
  self.gd = self.id;
  self.ld = self.id;
  ctx.stage1_progress();
  cfp_leave_inactive(self, ctx);
}

void MegcomProtocol::cfp_leave_inactive(NodeRuntime& self, Context& ctx) {
  for (const auto& [u, unused] : self.competes) {
    Message m;
    m.kind = MsgKind::Ack;
    m.id = self.id;
    m.state = self.state;
    ctx.send(u, m, 1);
  }
  self.competes.clear();
}

void MegcomProtocol::cfp_message(NodeRuntime& self, const Message& msg, Context& ctx) {
  const NodeId u = msg.src;
  switch (msg.kind) {
    case MsgKind::Compete: {
      if (self.state != NodeState::Inactive) {
        Message m;
        m.kind = MsgKind::Ack;
        m.id = self.id;
        m.state = self.state;
        ctx.send(u, m, 1);
      } else if (self.id > u && group_.is_member(self.id)) {
        if (self.accepted_to.insert(u).second) {
          Message m;
          m.kind = MsgKind::Accept;
          m.id = self.id;
          ctx.send(u, m, 1);
        }
      } else {
        self.competes[u] = {0, 0};
      }
      break;
    }
    case MsgKind::Accept:
      self.accepted_from.insert(u);
      cfp_try_join(self, ctx);
      break;
    case MsgKind::Ack:
      if (self.state != NodeState::Inactive) break;
      if (msg.state == NodeState::Connecting) {
        self.state = NodeState::Treed;
        self.gd = u;
        self.marked_edges.insert(Edge(self.id, u));
        ctx.mark_guard_edge(Edge(self.id, u));
        ctx.stage1_progress();
        cfp_leave_inactive(self, ctx);
      } else {
        self.nb_working.erase(u);
        cfp_try_join(self, ctx);
      }
      break;
    default:
      break;
  }
}

// ---------------------------------------------------------------- stage 2

bool MegcomProtocol::stage1_done(const Context& ctx) const {
  return std::none_of(group_.members().begin(), group_.members().end(),
                      [&ctx](NodeId m) { return unguarded(ctx.view(m).state); });
}

void MegcomProtocol::send_over_link(NodeId from, NodeId to, Message msg, Context& ctx) const {
  int hops = static_cast<int>(ctx.paths().canonical_path(from, to).size()) - 1;
  ctx.send(to, std::move(msg), hops);
}

void MegcomProtocol::stage2_scan(NodeRuntime& self, Context& ctx) {
  if (!self.s2_started) {
    if (self.state != NodeState::Connecting || self.gd != self.id || !stage1_done(ctx)) return;
    self.s2_started = true;
    self.ld = self.id;
    self.collected = {self.id};
  }
  if (is_leader(self)) advance_leader(self, ctx);
}

void MegcomProtocol::advance_leader(NodeRuntime& self, Context& ctx) {
  if (self.need_discover && !self.discovering) {
    self.need_discover = false;
    self.discovering = true;
    ++self.query_seq;
    self.query_leader = self.id;
    self.query_id = self.query_seq;
    self.query_parent = kNoNode;
    self.collected = {self.id};
    const auto& links = ctx.links_of(self.id);
    self.awaiting = static_cast<int>(links.size());
    for (NodeId w : links) {
      Message q;
      q.kind = MsgKind::Query;
      q.stage = 2;
      q.id = self.id;
      q.ld = self.id;
      q.query = self.query_id;
      send_over_link(self.id, w, q, ctx);
    }
    if (self.awaiting > 0) return;
    self.discovering = false;
  }
  if (self.discovering || self.prefer) return;

  std::set<NodeId> guardians;
  for (NodeId m : group_.members()) guardians.insert(ctx.view(m).gd);
  std::optional<std::tuple<double, NodeId, NodeId>> best;
  for (NodeId x : self.collected) {
    for (NodeId y : guardians) {
      if (self.collected.count(y)) continue;
      Edge e(x, y);
      std::tuple<double, NodeId, NodeId> key{ctx.paths().cost(x, y), e.a, e.b};
      if (!best || key < *best) best = key;
    }
  }
  if (!best) {
    self.state = NodeState::Treed;
    self.pending.clear();
    return;
  }
  Edge e(std::get<1>(*best), std::get<2>(*best));
  self.prefer = e;
  NodeId remote = self.collected.count(e.a) ? e.b : e.a;
  Message req;
  req.kind = MsgKind::CntReq;
  req.stage = 2;
  req.id = self.id;
  req.edge = e;
  req.requester = self.id;
  req.ld = self.ld;
  ctx.send(remote, req);

  std::vector<Message> pending;
  pending.swap(self.pending);
  for (const auto& m : pending) handle_request(self, m, ctx);
}

void MegcomProtocol::handle_request(NodeRuntime& self, const Message& msg, Context& ctx) {
  if (!self.s2_started) {
    self.pending.push_back(msg);
    return;
  }
  if (!is_leader(self)) {
    if (self.ld != kNoNode && self.ld != self.id) ctx.send(self.ld, msg);
    return;
  }
  if (self.discovering || self.need_discover || !self.prefer) {
    self.pending.push_back(msg);
    return;
  }
  if (*self.prefer != msg.edge) return;
  ctx.add_link(msg.edge);
  Message acc;
  acc.kind = MsgKind::Accept;
  acc.stage = 2;
  acc.id = self.id;
  acc.edge = msg.edge;
  acc.ld = std::min(self.ld, msg.ld);
  ctx.send(msg.requester, acc);
  resolve_merge(self, msg.ld, ctx);
}

void MegcomProtocol::resolve_merge(NodeRuntime& self, NodeId other_ld, Context& ctx) {
  self.prefer.reset();
  if (self.ld <= other_ld) {
    self.state = NodeState::Merging;
    self.need_discover = true;
    return;
  }
  self.state = NodeState::Treed;
  self.ld = other_ld;
  std::vector<Message> pending;
  pending.swap(self.pending);
  for (const auto& m : pending) ctx.send(self.ld, m);
}

void MegcomProtocol::stage2_message(NodeRuntime& self, const Message& msg, Context& ctx) {
  switch (msg.kind) {
    case MsgKind::CntReq:
      handle_request(self, msg, ctx);
      break;
    case MsgKind::Accept:
      if (!is_leader(self) || !self.prefer || *self.prefer != msg.edge) break;
      ctx.add_link(msg.edge);
      resolve_merge(self, msg.ld, ctx);
      if (is_leader(self)) advance_leader(self, ctx);
      break;
    case MsgKind::Query: {
      const NodeId leader = msg.ld;
      if (is_leader(self) && self.id != leader) {
        if (leader > self.id) break;
        self.state = NodeState::Treed;
        self.prefer.reset();
      }
      if (self.query_leader == leader && self.query_id == msg.query) {
        Message r;
        r.kind = MsgKind::Report;
        r.stage = 2;
        r.id = self.id;
        r.ld = leader;
        r.query = msg.query;
        send_over_link(self.id, msg.src, r, ctx);
        break;
      }
      self.ld = leader;
      self.query_leader = leader;
      self.query_id = msg.query;
      self.query_parent = msg.src;
      self.collected = {self.id};
      self.awaiting = 0;
      for (NodeId w : ctx.links_of(self.id)) {
        if (w == msg.src) continue;
        ++self.awaiting;
        Message q = msg;
        q.id = self.id;
        send_over_link(self.id, w, q, ctx);
      }
      if (self.awaiting == 0) {
        Message r;
        r.kind = MsgKind::Report;
        r.stage = 2;
        r.id = self.id;
        r.ld = leader;
        r.query = msg.query;
        r.nodes.assign(self.collected.begin(), self.collected.end());
        send_over_link(self.id, msg.src, r, ctx);
      }
      break;
    }
    case MsgKind::Report: {
      if (self.query_leader != msg.ld || self.query_id != msg.query || self.awaiting == 0) break;
      self.collected.insert(msg.nodes.begin(), msg.nodes.end());
      if (--self.awaiting > 0) break;
      if (self.query_parent == kNoNode) {
        self.discovering = false;
        advance_leader(self, ctx);
      } else {
        Message r = msg;
        r.id = self.id;
        r.nodes.assign(self.collected.begin(), self.collected.end());
        send_over_link(self.id, self.query_parent, r, ctx);
      }
      break;
    }
    default:
      break;
  }
}

}  // namespace megcom

namespace megcom {

GuardianAssignment extract_assignment(const SimOutcome& outcome, const GroupSpec& group) {
  GuardianAssignment out;
  for (NodeId m : group.members()) {
    const NodeRuntime& node = outcome.nodes.at(m);
    if (unguarded(node.state) || node.gd == kNoNode) {
      throw LivelockError("member " + std::to_string(m) + " left unguarded at quiescence",
                          outcome.trace);
    }
    out.guarded[m] = node.gd;
    out.guardians.insert(node.gd);
    if (node.gd != m) out.guard_edges.emplace(m, node.gd);
  }
  return out;
}

MulticastTree compose_tree(const GuardianAssignment& assignment, const MulticastTree& steiner_tree,
                           const GroupSpec& group) {
  MulticastTree tree = steiner_tree;
  for (const auto& [member, guardian] : assignment.guarded) {
    if (member == guardian || tree.contains(member)) continue;
    tree.add_edge(Edge(member, guardian));
  }
  std::set<NodeId> keep(group.members().begin(), group.members().end());
  tree = prune_leaves(std::move(tree), keep);
  if (!tree.is_tree() || !tree.spans(group.members())) {
    std::ostringstream msg;
    msg << "composed structure is not a tree spanning M; steiner:";
    for (const auto& e : steiner_tree.edges()) msg << ' ' << e.a << '-' << e.b;
    msg << " guard:";
    for (const auto& e : assignment.guard_edges) msg << ' ' << e.a << '-' << e.b;
    throw AlgorithmError(msg.str());
  }
  return tree;
}

ProtocolRun run_megcom(const Network& net, const ShortestPaths& paths, const GroupSpec& group,
                       std::uint64_t seed, const ProtocolConfig& config,
                       const KernelOptions& options) {
  group.validate(net);
  MegcomProtocol protocol(net, group, config);
  ProtocolRun run;
  run.outcome = run_protocol(net, paths, protocol.initial_state(), protocol, seed, options);
  run.assignment = extract_assignment(run.outcome, group);
  if (!config.run_stage2) return run;
  if (run.outcome.links.size() + 1 != run.assignment.guardians.size()) {
    throw LivelockError("fragment merging left the guardians disconnected", run.outcome.trace);
  }
  run.steiner = assemble_steiner(paths, run.outcome.links, run.assignment.guardians);
  run.tree = compose_tree(run.assignment, run.steiner, group);
  return run;
}

}  // namespace megcom
