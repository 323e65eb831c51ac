#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "megcom/types.hpp"

namespace megcom {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double euclid(const Point& p, const Point& q);

struct Neighbor {
  NodeId id;
  double weight;
};

/// Undirected weighted graph of wireless nodes. Node ids are 0..size()-1.
///
/// In fixed power mode every link costs `fixed_weight` (the per-packet
/// transmit energy); in adjustable mode a link costs distance^alpha.
class Network {
 public:
  Network() = default;

  /// Unit-disk graph: (u,v) is a link iff euclid(u,v) <= tx_range.
  static Network from_positions(std::vector<Point> positions, double tx_range,
                                PowerMode mode, double alpha = 2.0,
                                double fixed_weight = 200.0);

  /// Abstract graph with explicit link weights (no geometry). Used by tests
  /// that need a specific weighted topology.
  static Network from_edges(int n, const std::vector<std::pair<Edge, double>>& edges,
                            PowerMode mode);

  int size() const { return static_cast<int>(adjacency_.size()); }
  bool contains(NodeId v) const { return v >= 0 && v < size(); }

  std::span<const Neighbor> neighbors(NodeId v) const { return adjacency_.at(v); }
  int degree(NodeId v) const { return static_cast<int>(adjacency_.at(v).size()); }
  bool has_edge(NodeId u, NodeId v) const;
  /// Throws if (u,v) is not a link.
  double weight(NodeId u, NodeId v) const;
  std::vector<Edge> edges() const;

  bool has_geometry() const { return !positions_.empty(); }
  const std::vector<Point>& positions() const { return positions_; }
  double distance(NodeId u, NodeId v) const;

  double tx_range() const { return tx_range_; }
  PowerMode mode() const { return mode_; }
  double alpha() const { return alpha_; }
  double fixed_weight() const { return fixed_weight_; }

  bool connected() const;
  /// Nodes within two hops, excluding v itself, ascending.
  std::vector<NodeId> two_hop(NodeId v) const;

 private:
  std::vector<Point> positions_;
  std::vector<std::vector<Neighbor>> adjacency_;
  double tx_range_ = 0.0;
  PowerMode mode_ = PowerMode::Fixed;
  double alpha_ = 2.0;
  double fixed_weight_ = 200.0;
};

/// Group members with their packet counts p(u).
class GroupSpec {
 public:
  GroupSpec() = default;
  explicit GroupSpec(std::map<NodeId, int> packets);

  const std::vector<NodeId>& members() const { return members_; }
  const std::map<NodeId, int>& packets() const { return packets_; }
  bool is_member(NodeId v) const { return packets_.count(v) != 0; }
  /// p(v), or 0 for non-members.
  int packets_of(NodeId v) const;
  long long k() const { return k_; }
  int size() const { return static_cast<int>(members_.size()); }

  /// Throws PreconditionError unless members are nodes of net and |M| >= 2.
  void validate(const Network& net) const;

  bool operator==(const GroupSpec& other) const { return packets_ == other.packets_; }

 private:
  std::map<NodeId, int> packets_;
  std::vector<NodeId> members_;
  long long k_ = 0;
};

struct EnergyParams {
  double eps_s = 200.0;
  double eps_r = 20.0;
  double alpha = 2.0;
};

struct NetworkMetrics {
  int max_degree = 0;  // Delta
  int diameter = 0;    // D(G), in hops
};

NetworkMetrics compute_metrics(const Network& net);

inline constexpr int kDefaultMaxAttempts = 1000;

/// Places n nodes uniformly on a square of side sqrt(n/density) and retries
/// with a fresh sub-seed until the unit-disk graph is connected.
Network generate_network(int n, double density, double tx_range, PowerMode mode,
                         double alpha, std::uint64_t seed, double fixed_weight = 200.0,
                         int max_attempts = kDefaultMaxAttempts);

/// Bernoulli(member_fraction) membership, packets uniform in [lo, hi].
/// Resamples until at least two members are drawn.
GroupSpec select_group(const Network& net, double member_fraction, int packet_lo,
                       int packet_hi, std::uint64_t seed,
                       int max_attempts = kDefaultMaxAttempts);

struct PathResult {
  std::vector<NodeId> path;
  double cost = 0.0;
};

/// Minimum-weight path; among equal-cost paths the lexicographically smallest
/// node sequence wins.
PathResult shortest_path(const Network& net, NodeId u, NodeId v);

/// All-pairs shortest path tables for one network. Immutable after
/// construction and safe to share between threads.
class ShortestPaths {
 public:
  explicit ShortestPaths(const Network& net);

  const Network& network() const { return *net_; }
  /// Symmetric cost: always read from the row of the smaller endpoint.
  double cost(NodeId u, NodeId v) const;
  int hops(NodeId u, NodeId v) const;
  /// Same tie-break as shortest_path(); path(u,v) starts at u.
  std::vector<NodeId> path(NodeId u, NodeId v) const;
  /// Path oriented from min(u,v) to max(u,v); the canonical expansion of a
  /// closure edge.
  std::vector<NodeId> canonical_path(NodeId u, NodeId v) const;

 private:
  const Network* net_;
  int n_;
  std::vector<double> dist_;  // row-major, dist_[s*n + t] from Dijkstra at s
  std::vector<int> hops_;     // BFS hop distance
};

/// Instance file: header `n density tx_range mode alpha seed`, node lines
/// `id x y`, then `M:` member ids and `P:` packet counts in member order.
struct Instance {
  Network net;
  GroupSpec group;
  double density = 1.0;
  std::uint64_t seed = 0;
};

void write_instance(std::ostream& out, const Instance& inst);
Instance read_instance(std::istream& in, double fixed_weight = 200.0);

}  // namespace megcom
