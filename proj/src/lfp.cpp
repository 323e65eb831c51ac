#include "megcom/lfp.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "megcom/steiner.hpp"

namespace megcom {

std::set<NodeId> buddy_set(const Network& net, const GroupSpec& group) {
  group.validate(net);
  std::set<NodeId> out;
  for (NodeId v = 0; v < net.size(); ++v) {
    for (const auto& nb : net.neighbors(v)) {
      if (group.is_member(nb.id)) {
        out.insert(v);
        break;
      }
    }
  }
  return out;
}

bool covers(const Network& net, const GroupSpec& group, const std::set<NodeId>& guardians) {
  for (NodeId m : group.members()) {
    if (guardians.count(m)) continue;
    bool hit = false;
    for (const auto& nb : net.neighbors(m)) hit = hit || guardians.count(nb.id) != 0;
    if (!hit) return false;
  }
  return true;
}

ProtocolRun lfp_stage1(const Network& net, const ShortestPaths& paths, const GroupSpec& group,
                       std::uint64_t seed, const LfpOptions& options) {
  ProtocolConfig config;
  config.stage1 = Stage1::Lfp;
  config.self_count = options.self_count;
  config.run_stage2 = false;
  return run_megcom(net, paths, group, seed, config, options.kernel);
}

ProtocolRun run_lfp(const Network& net, const ShortestPaths& paths, const GroupSpec& group,
                    std::uint64_t seed, const LfpOptions& options) {
  ProtocolConfig config;
  config.stage1 = Stage1::Lfp;
  config.self_count = options.self_count;
  return run_megcom(net, paths, group, seed, config, options.kernel);
}

GuardianAssignment greedy_guardian_cover(const Network& net, const GroupSpec& group,
                                         bool self_count) {
  const auto buddies = buddy_set(net, group);
  std::set<NodeId> unguarded(group.members().begin(), group.members().end());
  GuardianAssignment out;
  while (!unguarded.empty()) {
    NodeId best = kNoNode;
    int best_ct = -1;
    for (NodeId v : buddies) {
      if (out.guardians.count(v)) continue;
      int ct = 0;
      for (const auto& nb : net.neighbors(v)) ct += static_cast<int>(unguarded.count(nb.id));
      bool self_open = unguarded.count(v) != 0;
      if (self_count && self_open) ++ct;
      if (ct == 0 && !self_open) continue;
      if (ct > best_ct) {
        best = v;
        best_ct = ct;
      }
    }
    if (best == kNoNode) throw AlgorithmError("buddy set cannot cover the group");
    out.guardians.insert(best);
    if (unguarded.erase(best)) out.guarded[best] = best;
    for (const auto& nb : net.neighbors(best)) {
      if (unguarded.erase(nb.id)) {
        out.guarded[nb.id] = best;
        out.guard_edges.emplace(nb.id, best);
      }
    }
  }
  return out;
}

const char* to_string(MaintenanceAction action) {
  switch (action) {
    case MaintenanceAction::AttachedToGuardian: return "attached-to-guardian";
    case MaintenanceAction::AlreadyOnTree: return "already-on-tree";
    case MaintenanceAction::PathToGuardian: return "path-to-guardian";
    case MaintenanceAction::RemovedLeaf: return "removed-leaf";
    case MaintenanceAction::Remerged: return "remerged";
  }
  return "?";
}

namespace {

bool cover_degraded(const Network& net, const MaintainedTree& state) {
  return greedy_guardian_cover(net, state.group).guardians.size() <
         state.assignment.guardians.size();
}

GroupSpec with_member(const GroupSpec& group, NodeId v, int packets) {
  auto p = group.packets();
  p[v] = packets;
  return GroupSpec(std::move(p));
}

}  // namespace

MaintenanceReport member_join(MaintainedTree& state, const Network& net,
                              const ShortestPaths& paths, NodeId new_member) {
  if (!net.contains(new_member)) throw PreconditionError("node outside the network");
  if (state.group.is_member(new_member)) throw PreconditionError("node is already a member");
  if (net.degree(new_member) == 0) throw PreconditionError("node has no links");

  MaintenanceReport report;
  state.group = with_member(state.group, new_member, 1);
  auto& asg = state.assignment;

  NodeId neighbor_guardian = kNoNode;
  for (const auto& nb : net.neighbors(new_member)) {
    if (asg.guardians.count(nb.id)) {
      neighbor_guardian = nb.id;
      break;
    }
  }
  if (asg.guardians.count(new_member)) neighbor_guardian = new_member;

  if (neighbor_guardian != kNoNode) {
    asg.guarded[new_member] = neighbor_guardian;
    if (neighbor_guardian != new_member) asg.guard_edges.emplace(new_member, neighbor_guardian);
    if (state.tree.contains(new_member)) {
      report.action = MaintenanceAction::AlreadyOnTree;
    } else {
      state.tree.add_edge(Edge(new_member, neighbor_guardian));
      report.action = MaintenanceAction::AttachedToGuardian;
    }
  } else {
    asg.guardians.insert(new_member);
    asg.guarded[new_member] = new_member;
    if (state.tree.contains(new_member)) {
      report.action = MaintenanceAction::AlreadyOnTree;
    } else {
      NodeId target = kNoNode;
      double best = 0.0;
      for (NodeId g : asg.guardians) {
        if (g == new_member || !state.tree.contains(g)) continue;
        double c = paths.cost(new_member, g);
        if (target == kNoNode || c < best) {
          target = g;
          best = c;
        }
      }
      if (target == kNoNode) throw AlgorithmError("no guardian on the tree to attach to");
      // Stop at the first node already on the tree so no cycle forms.
      auto p = paths.path(new_member, target);
      for (size_t i = 0; i + 1 < p.size(); ++i) {
        state.tree.add_edge(Edge(p[i], p[i + 1]));
        if (state.tree.degree(p[i + 1]) > 1) break;
      }
      report.action = MaintenanceAction::PathToGuardian;
    }
  }
  if (!state.tree.is_tree() || !state.tree.spans(state.group.members())) {
    throw AlgorithmError("join produced an invalid tree");
  }
  report.cover_degraded = cover_degraded(net, state);
  return report;
}

MaintenanceReport member_leave(MaintainedTree& state, const Network& net, NodeId member) {
  if (!state.group.is_member(member)) throw PreconditionError("node is not a member");
  if (state.group.size() <= 2) throw PreconditionError("group would drop below two members");

  auto packets = state.group.packets();
  packets.erase(member);
  state.group = GroupSpec(packets);
  std::set<NodeId> keep(state.group.members().begin(), state.group.members().end());
  auto& asg = state.assignment;
  MaintenanceReport report;

  asg.guardians.erase(member);
  asg.guarded.erase(member);
  for (auto& [m, g] : asg.guarded) {
    if (g == member) {
      g = m;
      asg.guardians.insert(m);
    }
  }
  std::erase_if(asg.guard_edges, [member](const Edge& e) { return e.touches(member); });

  if (state.tree.degree(member) <= 1) {
    state.tree.remove_node(member);
    state.tree = prune_leaves(std::move(state.tree), keep);
    report.action = MaintenanceAction::RemovedLeaf;
  } else {
    state.tree.remove_node(member);

    // Fragments of what is left, each reduced to the part that matters.
    std::map<NodeId, int> fragment;
    int count = 0;
    for (NodeId start : state.tree.nodes()) {
      if (fragment.count(start)) continue;
      std::vector<NodeId> stack{start};
      fragment[start] = count;
      while (!stack.empty()) {
        NodeId x = stack.back();
        stack.pop_back();
        for (NodeId y : state.tree.neighbors(x)) {
          if (fragment.emplace(y, count).second) stack.push_back(y);
        }
      }
      ++count;
    }
    for (NodeId m : keep) {
      if (!fragment.count(m)) fragment[m] = count++;
    }

    std::vector<std::pair<Edge, double>> links;
    for (const auto& e : net.edges()) {
      if (!e.touches(member)) links.emplace_back(e, net.weight(e.a, e.b));
    }
    Network reduced = Network::from_edges(net.size(), links, net.mode());
    ShortestPaths detour(reduced);

    // Kruskal over fragments: repeatedly join the closest pair.
    std::vector<int> parent(count);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::vector<std::tuple<double, NodeId, NodeId>> candidates;
    std::vector<NodeId> nodes;
    for (const auto& [v, f] : fragment) nodes.push_back(v);
    for (NodeId x : nodes) {
      for (NodeId y : nodes) {
        if (x < y && fragment[x] != fragment[y]) {
          double c = 0.0;
          try {
            c = detour.cost(x, y);
          } catch (const AlgorithmError&) {
            continue;
          }
          candidates.emplace_back(c, x, y);
        }
      }
    }
    std::sort(candidates.begin(), candidates.end());
    std::set<Edge> edges = state.tree.edges();
    for (const auto& [c, x, y] : candidates) {
      int fx = find(fragment[x]), fy = find(fragment[y]);
      if (fx == fy) continue;
      parent[std::max(fx, fy)] = std::min(fx, fy);
      auto p = detour.path(x, y);
      for (size_t i = 0; i + 1 < p.size(); ++i) edges.emplace(p[i], p[i + 1]);
    }
    std::vector<std::tuple<double, NodeId, NodeId>> order;
    for (const auto& e : edges) order.emplace_back(net.weight(e.a, e.b), e.a, e.b);
    std::sort(order.begin(), order.end());
    std::vector<int> uf(net.size());
    std::iota(uf.begin(), uf.end(), 0);
    auto root = [&uf](int x) {
      while (uf[x] != x) x = uf[x] = uf[uf[x]];
      return x;
    };
    std::set<Edge> kept;
    for (const auto& [w, a, b] : order) {
      int ra = root(a), rb = root(b);
      if (ra == rb) continue;
      uf[std::max(ra, rb)] = std::min(ra, rb);
      kept.emplace(a, b);
    }
    state.tree = prune_leaves(MulticastTree(keep, kept), keep);
    report.action = MaintenanceAction::Remerged;
  }
  if (!state.tree.is_tree() || !state.tree.spans(state.group.members())) {
    throw AlgorithmError("leave left the group disconnected");
  }
  report.cover_degraded = cover_degraded(net, state);
  return report;
}

}  // namespace megcom
