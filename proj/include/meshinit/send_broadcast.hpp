#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "meshinit/radiosim.hpp"

namespace meshinit::protocols {

using radiosim::NodeProgram;
using radiosim::Observation;
using radiosim::Payload;
using radiosim::SlotContext;
using radiosim::Transmission;

/// Payload tags shared by all protocols.
enum MessageTag : std::uint32_t {
  kData = 1,
  kRangeProbe = 2,   // SFR's "p"
  kDeconnexion = 3,  // SFR's "Deconnexion p"
  kStation = 4,      // single-hop initialization beacons
};

/// One SEND(msg, T, r) invocation: on slot start + i, i in [0, T], transmit
/// with probability base^-i.
class SendCall {
 public:
  SendCall(Payload msg, int trials, double radius, std::int64_t start, double base = 2.0);

  std::optional<Transmission> act(std::int64_t time, NodeRng& rng) const;
  std::int64_t start() const { return start_; }
  std::int64_t last_slot() const { return start_ + trials_; }

 private:
  Payload msg_;
  int trials_;
  double radius_;
  std::int64_t start_;
  double base_;
};

struct SendConfig {
  Payload message{kData, 0};
  int T = 0;
  double base = 2.0;
};

class SendProgram final : public NodeProgram {
 public:
  SendProgram(SendConfig cfg, double radius, std::int64_t start_time = 0);

  std::optional<Transmission> act(const SlotContext& ctx) override;
  void observe(const SlotContext& ctx, const Observation& obs) override;
  bool terminated() const override { return done_; }

 private:
  SendCall call_;
  bool done_ = false;
};

/// Silent node that records what it hears during [start, until].
class ListenerProgram final : public NodeProgram {
 public:
  explicit ListenerProgram(std::int64_t until);

  std::optional<Transmission> act(const SlotContext&) override { return std::nullopt; }
  void observe(const SlotContext& ctx, const Observation& obs) override;
  bool terminated() const override { return done_; }

  bool heard() const { return first_heard_.has_value(); }
  std::optional<std::int64_t> first_heard() const { return first_heard_; }
  std::int64_t messages() const { return messages_; }

 private:
  std::int64_t until_;
  std::optional<std::int64_t> first_heard_;
  std::int64_t messages_ = 0;
  bool done_ = false;
};

struct BroadcastConfig {
  double epsilon = 0.1;
  std::int64_t delta_bound = 2;  // upper bound on the maximum degree
  std::int64_t n_bound = 2;      // upper bound on the node count

  /// k = 2 ceil(log2 delta_bound)
  int k() const;
  /// tau = ceil(log2(n_bound / epsilon))
  int tau() const;
};

/// tau rounds of "wait until TIME mod k = 1, then SEND(msg, k, r)".
class BroadcastRounds {
 public:
  BroadcastRounds(Payload msg, int k, int rounds, double radius);

  std::optional<Transmission> act(std::int64_t time, NodeRng& rng);
  /// Call after every slot in which act() ran.
  void end_slot(std::int64_t time);
  bool done() const { return rounds_done_ >= rounds_; }
  const std::vector<std::int64_t>& send_starts() const { return send_starts_; }

 private:
  Payload msg_;
  int k_;
  int rounds_;
  double radius_;
  int rounds_done_ = 0;
  std::optional<SendCall> current_;
  std::vector<std::int64_t> send_starts_;
};

/// BROADCAST(msg, eps, Delta, r, N). Non-initiators stay silent until they
/// first hear a message carrying msg's tag, then relay it for tau rounds.
class BroadcastProgram final : public NodeProgram {
 public:
  BroadcastProgram(const BroadcastConfig& cfg, double radius, bool initiator, Payload msg);

  std::optional<Transmission> act(const SlotContext& ctx) override;
  void observe(const SlotContext& ctx, const Observation& obs) override;
  bool terminated() const override { return rounds_.done(); }

  bool informed() const { return informed_; }
  /// Slot of first reception; -1 for initiators.
  std::optional<std::int64_t> informed_time() const { return informed_time_; }
  const std::vector<std::int64_t>& send_starts() const { return rounds_.send_starts(); }
  int k() const { return k_; }

 private:
  int k_;
  int tau_;
  double radius_;
  bool informed_;
  std::optional<std::int64_t> informed_time_;
  Payload msg_;
  BroadcastRounds rounds_;
};

struct StarSendResult {
  bool center_heard = false;
  std::int64_t slots = 0;
};

/// d leaves around one listening center run SEND(T) simultaneously.
StarSendResult run_star_send(int d, int T, double base, std::uint64_t seed,
                             radiosim::ProtocolTrace* trace = nullptr);

struct BroadcastResult {
  std::size_t informed = 0;
  std::int64_t last_informed = -1;  // latest first-reception slot
  std::int64_t slots = 0;
  radiosim::RunStatus status = radiosim::RunStatus::terminated;
  bool aligned = true;              // every SEND began at TIME mod k = 1
};

/// BROADCAST over `net` at radius net.radius(), started at TIME = 0.
BroadcastResult run_broadcast(const Network& net, const BroadcastConfig& cfg,
                              const std::vector<NodeId>& initiators, std::uint64_t seed,
                              std::int64_t max_slots, radiosim::ProtocolTrace* trace = nullptr);

/// Graph 0 = center, 1..d = leaves attached only to the center.
NeighborLists star_graph(int d);

}  // namespace meshinit::protocols
