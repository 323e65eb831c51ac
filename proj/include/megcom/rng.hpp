#pragma once

#include <cstdint>
#include <random>

namespace megcom {

/// Independent random streams derived from one experiment seed.
enum class Stream : std::uint32_t {
  Placement = 1,
  Membership = 2,
  ScanPhase = 3,
  Root = 4,
};

inline std::mt19937_64 make_rng(std::uint64_t seed, Stream stream, std::uint64_t sub = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(sub),
                    static_cast<std::uint32_t>(sub >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace megcom
