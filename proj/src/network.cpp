#include "megcom/network.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include "megcom/rng.hpp"

namespace megcom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool cost_equal(double a, double b) {
  return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

std::vector<double> dijkstra(const Network& net, NodeId source) {
  std::vector<double> dist(net.size(), kInf);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    auto [d, x] = queue.top();
    queue.pop();
    if (d > dist[x]) continue;
    for (const auto& nb : net.neighbors(x)) {
      double nd = d + nb.weight;
      if (nd < dist[nb.id]) {
        dist[nb.id] = nd;
        queue.emplace(nd, nb.id);
      }
    }
  }
  return dist;
}

std::vector<int> bfs_hops(const Network& net, NodeId source) {
  std::vector<int> hops(net.size(), -1);
  std::queue<NodeId> queue;
  hops[source] = 0;
  queue.push(source);
  while (!queue.empty()) {
    NodeId x = queue.front();
    queue.pop();
    for (const auto& nb : net.neighbors(x)) {
      if (hops[nb.id] < 0) {
        hops[nb.id] = hops[x] + 1;
        queue.push(nb.id);
      }
    }
  }
  return hops;
}

// Walks from u towards the target whose distance row is `to_target`, always
// taking the smallest-id neighbor that stays on a shortest path.
std::vector<NodeId> greedy_path(const Network& net, NodeId u, NodeId target,
                                const double* to_target) {
  if (!std::isfinite(to_target[u])) {
    throw AlgorithmError("no path between " + std::to_string(u) + " and " +
                         std::to_string(target));
  }
  std::vector<NodeId> path{u};
  NodeId x = u;
  while (x != target) {
    NodeId next = kNoNode;
    for (const auto& nb : net.neighbors(x)) {  // ascending id
      if (cost_equal(nb.weight + to_target[nb.id], to_target[x])) {
        next = nb.id;
        break;
      }
    }
    if (next == kNoNode || path.size() > static_cast<size_t>(net.size())) {
      throw AlgorithmError("shortest path reconstruction failed");
    }
    path.push_back(next);
    x = next;
  }
  return path;
}

}  // namespace

const char* to_string(PowerMode mode) {
  return mode == PowerMode::Fixed ? "fixed" : "adjustable";
}

PowerMode power_mode_from_string(const std::string& text) {
  if (text == "fixed") return PowerMode::Fixed;
  if (text == "adjustable") return PowerMode::Adjustable;
  throw PreconditionError("unknown power mode: " + text);
}

double euclid(const Point& p, const Point& q) { return std::hypot(p.x - q.x, p.y - q.y); }

Network Network::from_positions(std::vector<Point> positions, double tx_range,
                                PowerMode mode, double alpha, double fixed_weight) {
  if (tx_range <= 0.0) throw PreconditionError("tx_range must be positive");
  Network net;
  net.positions_ = std::move(positions);
  net.tx_range_ = tx_range;
  net.mode_ = mode;
  net.alpha_ = alpha;
  net.fixed_weight_ = fixed_weight;
  const int n = static_cast<int>(net.positions_.size());
  net.adjacency_.assign(n, {});
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u == v) continue;
      double d = euclid(net.positions_[u], net.positions_[v]);
      if (d <= tx_range) {
        double w = mode == PowerMode::Fixed ? fixed_weight : std::pow(d, alpha);
        net.adjacency_[u].push_back({v, w});
      }
    }
  }
  return net;
}

Network Network::from_edges(int n, const std::vector<std::pair<Edge, double>>& edges,
                            PowerMode mode) {
  Network net;
  net.mode_ = mode;
  net.adjacency_.assign(n, {});
  for (const auto& [e, w] : edges) {
    if (e.a < 0 || e.b >= n || e.a == e.b) throw PreconditionError("bad edge");
    net.adjacency_[e.a].push_back({e.b, w});
    net.adjacency_[e.b].push_back({e.a, w});
  }
  for (auto& list : net.adjacency_) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& l, const Neighbor& r) { return l.id < r.id; });
  }
  if (!edges.empty()) net.fixed_weight_ = edges.front().second;
  return net;
}

bool Network::has_edge(NodeId u, NodeId v) const {
  if (!contains(u) || !contains(v)) return false;
  const auto& list = adjacency_[u];
  auto it = std::lower_bound(list.begin(), list.end(), v,
                             [](const Neighbor& nb, NodeId id) { return nb.id < id; });
  return it != list.end() && it->id == v;
}

double Network::weight(NodeId u, NodeId v) const {
  const auto& list = adjacency_.at(u);
  auto it = std::lower_bound(list.begin(), list.end(), v,
                             [](const Neighbor& nb, NodeId id) { return nb.id < id; });
  if (it == list.end() || it->id != v) {
    throw PreconditionError("no link between " + std::to_string(u) + " and " +
                            std::to_string(v));
  }
  return it->weight;
}

std::vector<Edge> Network::edges() const {
  std::vector<Edge> out;
  for (NodeId u = 0; u < size(); ++u) {
    for (const auto& nb : adjacency_[u]) {
      if (u < nb.id) out.emplace_back(u, nb.id);
    }
  }
  return out;
}

double Network::distance(NodeId u, NodeId v) const {
  if (!has_geometry()) throw PreconditionError("network has no coordinates");
  return euclid(positions_.at(u), positions_.at(v));
}

bool Network::connected() const {
  if (size() == 0) return true;
  auto hops = bfs_hops(*this, 0);
  return std::none_of(hops.begin(), hops.end(), [](int h) { return h < 0; });
}

std::vector<NodeId> Network::two_hop(NodeId v) const {
  std::vector<NodeId> out;
  for (const auto& nb : neighbors(v)) {
    out.push_back(nb.id);
    for (const auto& nb2 : neighbors(nb.id)) out.push_back(nb2.id);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  out.erase(std::remove(out.begin(), out.end(), v), out.end());
  return out;
}

GroupSpec::GroupSpec(std::map<NodeId, int> packets) : packets_(std::move(packets)) {
  for (const auto& [id, p] : packets_) {
    if (p < 1) throw PreconditionError("packet count must be >= 1");
    members_.push_back(id);
    k_ += p;
  }
}

int GroupSpec::packets_of(NodeId v) const {
  auto it = packets_.find(v);
  return it == packets_.end() ? 0 : it->second;
}

void GroupSpec::validate(const Network& net) const {
  if (size() < 2) throw PreconditionError("group needs at least two members");
  for (NodeId m : members_) {
    if (!net.contains(m)) throw PreconditionError("member " + std::to_string(m) + " not in network");
  }
}

NetworkMetrics compute_metrics(const Network& net) {
  NetworkMetrics metrics;
  for (NodeId v = 0; v < net.size(); ++v) {
    metrics.max_degree = std::max(metrics.max_degree, net.degree(v));
  }
  for (NodeId v = 0; v < net.size(); ++v) {
    for (int h : bfs_hops(net, v)) metrics.diameter = std::max(metrics.diameter, h);
  }
  return metrics;
}

Network generate_network(int n, double density, double tx_range, PowerMode mode,
                         double alpha, std::uint64_t seed, double fixed_weight,
                         int max_attempts) {
  if (n < 2) throw PreconditionError("need at least two nodes");
  if (density <= 0.0) throw PreconditionError("density must be positive");
  if (tx_range <= 0.0) throw PreconditionError("tx_range must be positive");
  const double side = std::sqrt(n / density);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    auto rng = make_rng(seed, Stream::Placement, static_cast<std::uint64_t>(attempt));
    std::uniform_real_distribution<double> coord(0.0, side);
    std::vector<Point> positions(n);
    for (auto& p : positions) {
      p.x = coord(rng);
      p.y = coord(rng);
    }
    auto net = Network::from_positions(std::move(positions), tx_range, mode, alpha, fixed_weight);
    if (net.connected()) return net;
  }
  throw AlgorithmError("no connected network after " + std::to_string(max_attempts) +
                       " attempts (n=" + std::to_string(n) + ", seed=" + std::to_string(seed) +
                       ")");
}

GroupSpec select_group(const Network& net, double member_fraction, int packet_lo,
                       int packet_hi, std::uint64_t seed, int max_attempts) {
  if (!(member_fraction > 0.0 && member_fraction <= 1.0)) {
    throw PreconditionError("member_fraction must be in (0, 1]");
  }
  if (packet_lo < 1 || packet_lo > packet_hi) throw PreconditionError("bad packet range");
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    auto rng = make_rng(seed, Stream::Membership, static_cast<std::uint64_t>(attempt));
    std::bernoulli_distribution coin(member_fraction);
    std::uniform_int_distribution<int> packets(packet_lo, packet_hi);
    std::map<NodeId, int> chosen;
    for (NodeId v = 0; v < net.size(); ++v) {
      if (coin(rng)) chosen[v] = 0;
    }
    if (chosen.size() < 2) continue;
    for (auto& [id, p] : chosen) p = packets(rng);
    return GroupSpec(std::move(chosen));
  }
  throw AlgorithmError("could not draw two members after " + std::to_string(max_attempts) +
                       " attempts");
}

PathResult shortest_path(const Network& net, NodeId u, NodeId v) {
  if (!net.contains(u) || !net.contains(v)) throw PreconditionError("node not in network");
  auto to_v = dijkstra(net, v);
  PathResult result;
  result.path = greedy_path(net, u, v, to_v.data());
  for (size_t i = 1; i < result.path.size(); ++i) {
    result.cost += net.weight(result.path[i - 1], result.path[i]);
  }
  return result;
}

ShortestPaths::ShortestPaths(const Network& net)
    : net_(&net), n_(net.size()), dist_(static_cast<size_t>(n_) * n_), hops_(dist_.size()) {
  for (NodeId s = 0; s < n_; ++s) {
    auto row = dijkstra(net, s);
    std::copy(row.begin(), row.end(), dist_.begin() + static_cast<size_t>(s) * n_);
    auto hrow = bfs_hops(net, s);
    std::copy(hrow.begin(), hrow.end(), hops_.begin() + static_cast<size_t>(s) * n_);
  }
}

double ShortestPaths::cost(NodeId u, NodeId v) const {
  NodeId lo = std::min(u, v), hi = std::max(u, v);
  double c = dist_[static_cast<size_t>(lo) * n_ + hi];
  if (!std::isfinite(c)) throw AlgorithmError("unreachable node pair");
  return c;
}

int ShortestPaths::hops(NodeId u, NodeId v) const {
  return hops_[static_cast<size_t>(u) * n_ + v];
}

std::vector<NodeId> ShortestPaths::path(NodeId u, NodeId v) const {
  return greedy_path(*net_, u, v, dist_.data() + static_cast<size_t>(v) * n_);
}

std::vector<NodeId> ShortestPaths::canonical_path(NodeId u, NodeId v) const {
  return path(std::min(u, v), std::max(u, v));
}

void write_instance(std::ostream& out, const Instance& inst) {
  const auto& net = inst.net;
  if (!net.has_geometry()) throw PreconditionError("instance files need coordinates");
  out.precision(17);
  out << net.size() << ' ' << inst.density << ' ' << net.tx_range() << ' '
      << to_string(net.mode()) << ' ' << net.alpha() << ' ' << inst.seed << '\n';
  for (NodeId v = 0; v < net.size(); ++v) {
    out << v << ' ' << net.positions()[v].x << ' ' << net.positions()[v].y << '\n';
  }
  out << "M:";
  for (NodeId m : inst.group.members()) out << ' ' << m;
  out << "\nP:";
  for (NodeId m : inst.group.members()) out << ' ' << inst.group.packets_of(m);
  out << '\n';
}

Instance read_instance(std::istream& in, double fixed_weight) {
  Instance inst;
  int n = 0;
  double tx_range = 0.0, alpha = 2.0;
  std::string mode;
  if (!(in >> n >> inst.density >> tx_range >> mode >> alpha >> inst.seed)) {
    throw PreconditionError("malformed instance header");
  }
  std::vector<Point> positions(n);
  for (int i = 0; i < n; ++i) {
    NodeId id = 0;
    Point p;
    if (!(in >> id >> p.x >> p.y) || id < 0 || id >= n) {
      throw PreconditionError("malformed node line");
    }
    positions[id] = p;
  }
  auto read_list = [&in](const std::string& tag) {
    std::string line;
    while (line.empty() && std::getline(in, line)) {
    }
    if (line.rfind(tag, 0) != 0) throw PreconditionError("expected " + tag + " line");
    std::istringstream fields(line.substr(tag.size()));
    std::vector<long long> values;
    long long x = 0;
    while (fields >> x) values.push_back(x);
    return values;
  };
  auto ids = read_list("M:");
  auto counts = read_list("P:");
  if (ids.size() != counts.size()) throw PreconditionError("M and P lengths differ");
  std::map<NodeId, int> packets;
  for (size_t i = 0; i < ids.size(); ++i) {
    packets[static_cast<NodeId>(ids[i])] = static_cast<int>(counts[i]);
  }
  inst.net = Network::from_positions(std::move(positions), tx_range,
                                     power_mode_from_string(mode), alpha, fixed_weight);
  inst.group = GroupSpec(std::move(packets));
  return inst;
}

}  // namespace megcom
