#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace megcom {

using NodeId = std::int32_t;

inline constexpr NodeId kNoNode = -1;

/// Unordered node pair, stored with a <= b.
struct Edge {
  NodeId a = kNoNode;
  NodeId b = kNoNode;

  Edge() = default;
  Edge(NodeId u, NodeId v) : a(u < v ? u : v), b(u < v ? v : u) {}

  bool touches(NodeId v) const { return a == v || b == v; }
  NodeId other(NodeId v) const { return v == a ? b : a; }

  auto operator<=>(const Edge&) const = default;
};

enum class PowerMode { Fixed, Adjustable };

const char* to_string(PowerMode mode);
PowerMode power_mode_from_string(const std::string& text);

/// Raised when a caller violates an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when generation or an algorithm cannot produce a valid result.
class AlgorithmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace megcom
