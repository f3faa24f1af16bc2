#include "meshinit/radiosim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace meshinit::radiosim {

ChannelModel ChannelModel::multihop(Network net) {
  ChannelModel m;
  m.topology_ = Topology::geometric;
  m.size_ = net.size();
  m.network_ = std::make_shared<const Network>(std::move(net));
  // About one node per cell: disk queries stay cheap for any radius.
  const double cell = m.network_->side() / std::max(1.0, std::ceil(std::sqrt(double(m.size_))));
  m.grid_ = std::make_shared<const SpatialGrid>(m.network_->nodes(), m.network_->side(), cell);
  return m;
}

ChannelModel ChannelModel::multihop(NeighborLists graph) {
  ChannelModel m;
  m.topology_ = Topology::graph;
  m.size_ = graph.size();
  for (NodeId v = 0; v < graph.size(); ++v) {
    for (NodeId u : graph[v]) {
      if (u >= graph.size() || u == v) throw std::invalid_argument("ChannelModel: bad neighbor list");
    }
  }
  m.graph_ = std::make_shared<const NeighborLists>(std::move(graph));
  return m;
}

ChannelModel ChannelModel::single_hop(std::size_t n, bool collision_detection) {
  ChannelModel m;
  m.topology_ = Topology::single_hop;
  m.size_ = n;
  m.collision_detection_ = collision_detection;
  return m;
}

Channel::Channel(ChannelModel model) : model_(std::move(model)) {
  const std::size_t n = model_.size();
  outcome_.receptions.assign(n, Observation{});
  heard_count_.assign(n, 0);
  transmitting_.assign(n, 0);
}

const SlotOutcome& Channel::step(std::span<const Emission> emissions) {
  const std::size_t n = model_.size();
  auto& rx = outcome_.receptions;

  for (NodeId v : outcome_.transmitters) transmitting_[v] = 0;
  for (NodeId v : touched_) {
    heard_count_[v] = 0;
    rx[v] = Observation{};
  }
  touched_.clear();
  outcome_.transmitters.clear();

  for (const Emission& e : emissions) {
    if (e.node >= n) throw std::invalid_argument("step: transmitter not in topology");
    if (transmitting_[e.node]) throw std::invalid_argument("step: node transmits twice in one slot");
    transmitting_[e.node] = 1;
    outcome_.transmitters.push_back(e.node);
  }
  std::sort(outcome_.transmitters.begin(), outcome_.transmitters.end());

  const bool cd = model_.collision_detection();
  if (model_.topology() == Topology::single_hop) {
    // Everyone hears everyone: resolve from the global transmitter count.
    const std::size_t count = emissions.size();
    if (count == 0) return outcome_;
    for (NodeId v = 0; v < n; ++v) touched_.push_back(v);
    for (NodeId v = 0; v < n; ++v) {
      if (transmitting_[v]) {
        rx[v].kind = (cd && count >= 2) ? Reception::collision : Reception::silence;
      } else if (count == 1) {
        rx[v] = Observation{Reception::message, emissions[0].payload};
      } else {
        rx[v].kind = cd ? Reception::collision : Reception::silence;
      }
    }
    return outcome_;
  }

  for (const Emission& e : emissions) {
    model_.for_each_receiver(e.node, e.radius, [&](NodeId v) {
      if (heard_count_[v]++ == 0) {
        touched_.push_back(v);
        rx[v].payload = e.payload;
      }
    });
  }
  for (NodeId v : touched_) {
    if (transmitting_[v] || heard_count_[v] != 1) {
      rx[v] = Observation{};
    } else {
      rx[v].kind = Reception::message;
    }
  }
  return outcome_;
}

SlotOutcome step(const ChannelModel& model, std::span<const Emission> emissions) {
  Channel channel(model);
  return channel.step(emissions);
}

ProtocolTrace run(const ChannelModel& model, Programs& programs, const RunOptions& options,
                  const RngStream& rng) {
  if (options.max_slots < 1) throw std::invalid_argument("run: max_slots must be >= 1");
  if (programs.size() != model.size()) throw std::invalid_argument("run: one program per node required");

  Channel channel(model);
  ProtocolTrace trace;
  trace.start_time = options.start_time;
  const std::size_t n = programs.size();

  std::vector<std::uint8_t> live(n, 1);
  std::size_t live_count = 0;
  for (std::size_t v = 0; v < n; ++v) {
    live[v] = programs[v]->terminated() ? 0 : 1;
    live_count += live[v];
  }

  std::vector<Emission> emissions;
  std::vector<NodeRng> rngs;
  rngs.reserve(n);
  std::int64_t slot = 0;
  for (; slot < options.max_slots && live_count > 0; ++slot) {
    const std::int64_t time = options.start_time + slot;
    emissions.clear();
    rngs.clear();
    for (std::size_t v = 0; v < n; ++v) rngs.emplace_back(rng, v, time);
    for (std::size_t v = 0; v < n; ++v) {
      if (!live[v]) continue;
      SlotContext ctx{time, static_cast<NodeId>(v), &rngs[v]};
      if (auto tx = programs[v]->act(ctx)) {
        emissions.push_back(Emission{static_cast<NodeId>(v), tx->payload, tx->radius});
      }
    }
    const SlotOutcome& outcome = channel.step(emissions);
    for (std::size_t v = 0; v < n; ++v) {
      if (!live[v]) continue;
      SlotContext ctx{time, static_cast<NodeId>(v), &rngs[v]};
      programs[v]->observe(ctx, outcome.receptions[v]);
    }
    if (options.record_slots) trace.slots.push_back(outcome);
    for (std::size_t v = 0; v < n; ++v) {
      if (live[v] && programs[v]->terminated()) {
        live[v] = 0;
        --live_count;
      }
    }
  }
  trace.slot_count = slot;
  trace.status = live_count == 0 ? RunStatus::terminated : RunStatus::truncated;
  trace.terminated_nodes.resize(n);
  for (std::size_t v = 0; v < n; ++v) trace.terminated_nodes[v] = live[v] ? 0 : 1;
  return trace;
}

char reception_code(Reception r) {
  switch (r) {
    case Reception::silence:
      return 'S';
    case Reception::message:
      return 'M';
    case Reception::collision:
      return 'C';
  }
  return '?';
}

void write_trace(std::ostream& out, const ProtocolTrace& trace) {
  for (std::size_t s = 0; s < trace.slots.size(); ++s) {
    const SlotOutcome& slot = trace.slots[s];
    out << (trace.start_time + static_cast<std::int64_t>(s)) << '\t';
    if (slot.transmitters.empty()) out << '-';
    for (std::size_t i = 0; i < slot.transmitters.size(); ++i) {
      if (i) out << ',';
      out << slot.transmitters[i];
    }
    out << '\t';
    for (const Observation& o : slot.receptions) out << reception_code(o.kind);
    out << '\n';
  }
}

}  // namespace meshinit::radiosim
