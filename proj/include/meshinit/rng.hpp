#pragma once

#include <cstdint>
#include <string_view>

namespace meshinit {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-trial seed derived from (master seed, experiment name, trial index).
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view name, std::uint64_t trial) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the name
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(master ^ h) ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
}

/// Counter-based stream: every draw is a pure function of
/// (seed, node, slot, draw index), so per-node updates may run in any order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), base_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(std::uint64_t node, std::int64_t slot, std::uint64_t draw) const {
    std::uint64_t h = splitmix64(base_ ^ (node * 0xd6e8feb86659fd93ULL));
    h = splitmix64(h ^ static_cast<std::uint64_t>(slot));
    return splitmix64(h ^ (draw * 0x9e3779b97f4a7c15ULL));
  }

  double uniform(std::uint64_t node, std::int64_t slot, std::uint64_t draw) const {
    return static_cast<double>(bits(node, slot, draw) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t base_;
};

/// Sequential draws bound to one (node, slot).
class NodeRng {
 public:
  NodeRng(const RngStream& stream, std::uint64_t node, std::int64_t slot)
      : stream_(&stream), node_(node), slot_(slot) {}

  double uniform() { return stream_->uniform(node_, slot_, draw_++); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>((stream_->bits(node_, slot_, draw_++) >> 32) * n >> 32);
  }

 private:
  const RngStream* stream_;
  std::uint64_t node_;
  std::int64_t slot_;
  std::uint64_t draw_ = 0;
};

}  // namespace meshinit
