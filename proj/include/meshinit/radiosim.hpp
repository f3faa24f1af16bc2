#pragma once

// Slotted synchronous radio channel. A listener hears a message iff exactly
// one in-range node transmits in the slot; otherwise it hears silence, or
// `collision` on a channel with collision detection.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "meshinit/geomnet.hpp"
#include "meshinit/rng.hpp"

namespace meshinit::radiosim {

struct Payload {
  std::uint32_t tag = 0;
  std::int64_t value = 0;
  bool operator==(const Payload&) const = default;
};

enum class Reception : std::uint8_t { silence, message, collision };

struct Observation {
  Reception kind = Reception::silence;
  Payload payload{};
};

/// A node putting `payload` on the air. A negative radius means the
/// topology default (the network range); only geometric topologies use it.
struct Emission {
  NodeId node = 0;
  Payload payload{};
  double radius = -1.0;
};

enum class Topology { geometric, graph, single_hop };

/// Who hears whom. Multihop channels (geometric or explicit graph) never
/// detect collisions; a single-hop channel may.
///
/// Geometric reception is decided by the transmitter's own radius: v hears
/// u iff |u - v| <= radius(u). Any two nodes of a single-hop channel hear
/// each other.
class ChannelModel {
 public:
  static ChannelModel multihop(Network net);
  static ChannelModel multihop(NeighborLists graph);
  static ChannelModel single_hop(std::size_t n, bool collision_detection);

  Topology topology() const { return topology_; }
  bool collision_detection() const { return collision_detection_; }
  std::size_t size() const { return size_; }
  const Network* network() const { return network_.get(); }

  /// Calls f(v) for every node v != u in range of a transmission by u.
  template <class F>
  void for_each_receiver(NodeId u, double radius, F&& f) const {
    switch (topology_) {
      case Topology::geometric: {
        const double r = radius < 0.0 ? network_->radius() : radius;
        grid_->for_each_within(network_->node(u), r, [&](NodeId v) {
          if (v != u) f(v);
        });
        break;
      }
      case Topology::graph:
        for (NodeId v : (*graph_)[u]) f(v);
        break;
      case Topology::single_hop:
        for (NodeId v = 0; v < size_; ++v)
          if (v != u) f(v);
        break;
    }
  }

 private:
  ChannelModel() = default;

  Topology topology_ = Topology::single_hop;
  bool collision_detection_ = false;
  std::size_t size_ = 0;
  std::shared_ptr<const Network> network_;
  std::shared_ptr<const SpatialGrid> grid_;
  std::shared_ptr<const NeighborLists> graph_;
};

struct SlotOutcome {
  std::vector<Observation> receptions;  // one per node
  std::vector<NodeId> transmitters;     // ascending
};

/// Channel resolution with reusable scratch space.
///
/// Transmitters receive nothing in their own slot. On a collision-detecting
/// single-hop channel a transmitter still senses whether anyone else
/// transmitted: it observes `collision` if so and `silence` otherwise.
class Channel {
 public:
  explicit Channel(ChannelModel model);

  const ChannelModel& model() const { return model_; }

  /// Throws std::invalid_argument on an unknown or repeated transmitter.
  const SlotOutcome& step(std::span<const Emission> emissions);

 private:
  ChannelModel model_;
  SlotOutcome outcome_;
  std::vector<std::uint32_t> heard_count_;
  std::vector<std::uint8_t> transmitting_;
  std::vector<NodeId> touched_;
};

SlotOutcome step(const ChannelModel& model, std::span<const Emission> emissions);

struct Transmission {
  Payload payload{};
  double radius = -1.0;
};

struct SlotContext {
  std::int64_t time = 0;  // global TIME visible to every program
  NodeId node = 0;
  NodeRng* rng = nullptr;
};

/// A node's protocol as a state machine driven once per slot: act() decides
/// whether to transmit, observe() delivers what the node heard in the slot.
class NodeProgram {
 public:
  virtual ~NodeProgram() = default;
  virtual std::optional<Transmission> act(const SlotContext& ctx) = 0;
  virtual void observe(const SlotContext& ctx, const Observation& obs) = 0;
  virtual bool terminated() const = 0;
};

using Programs = std::vector<std::unique_ptr<NodeProgram>>;

enum class RunStatus { terminated, truncated };

struct RunOptions {
  std::int64_t max_slots = 1;
  std::int64_t start_time = 0;
  bool record_slots = false;
};

struct ProtocolTrace {
  std::vector<SlotOutcome> slots;  // filled only with RunOptions::record_slots
  std::int64_t slot_count = 0;
  std::int64_t start_time = 0;
  RunStatus status = RunStatus::terminated;
  std::vector<std::uint8_t> terminated_nodes;
};

/// Runs all programs in lockstep until every one reports terminated or
/// max_slots slots have elapsed. Terminated programs neither transmit nor
/// observe.
ProtocolTrace run(const ChannelModel& model, Programs& programs, const RunOptions& options,
                  const RngStream& rng);

/// One line per slot: "<time>\t<transmitters comma-separated, or ->\t<S|M|C per node>".
void write_trace(std::ostream& out, const ProtocolTrace& trace);

char reception_code(Reception r);

}  // namespace meshinit::radiosim
