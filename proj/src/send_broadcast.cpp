#include "meshinit/send_broadcast.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "meshinit/limits.hpp"

namespace meshinit::protocols {

SendCall::SendCall(Payload msg, int trials, double radius, std::int64_t start, double base)
    : msg_(msg), trials_(trials), radius_(radius), start_(start), base_(base) {
  if (trials < 0) throw std::invalid_argument("SEND: T must be >= 0");
  if (!(base > 1.0)) throw std::invalid_argument("SEND: base must be > 1");
}

std::optional<Transmission> SendCall::act(std::int64_t time, NodeRng& rng) const {
  const std::int64_t i = time - start_;
  if (i < 0 || i > trials_) return std::nullopt;
  const double p = std::pow(base_, -static_cast<double>(i));
  if (!rng.bernoulli(p)) return std::nullopt;
  return Transmission{msg_, radius_};
}

SendProgram::SendProgram(SendConfig cfg, double radius, std::int64_t start_time)
    : call_(cfg.message, cfg.T, radius, start_time, cfg.base) {}

std::optional<Transmission> SendProgram::act(const SlotContext& ctx) {
  return call_.act(ctx.time, *ctx.rng);
}

void SendProgram::observe(const SlotContext& ctx, const Observation&) {
  if (ctx.time >= call_.last_slot()) done_ = true;
}

ListenerProgram::ListenerProgram(std::int64_t until) : until_(until) {
  if (until < 0) done_ = true;
}

void ListenerProgram::observe(const SlotContext& ctx, const Observation& obs) {
  if (obs.kind == radiosim::Reception::message) {
    ++messages_;
    if (!first_heard_) first_heard_ = ctx.time;
  }
  if (ctx.time >= until_) done_ = true;
}

int BroadcastConfig::k() const {
  if (delta_bound < 2) throw std::invalid_argument("BROADCAST: delta bound must be >= 2");
  return 2 * limits::ceil_log2(delta_bound);
}

int BroadcastConfig::tau() const {
  if (n_bound < 2) throw std::invalid_argument("BROADCAST: N bound must be >= 2");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("BROADCAST: epsilon outside (0,1)");
  return static_cast<int>(std::ceil(std::log2(static_cast<double>(n_bound)) - std::log2(epsilon)));
}

BroadcastRounds::BroadcastRounds(Payload msg, int k, int rounds, double radius)
    : msg_(msg), k_(k), rounds_(rounds), radius_(radius) {
  if (k < 1) throw std::invalid_argument("BROADCAST: k must be >= 1");
}

std::optional<Transmission> BroadcastRounds::act(std::int64_t time, NodeRng& rng) {
  if (done()) return std::nullopt;
  if (!current_) {
    if (time % k_ != 1 % k_) return std::nullopt;
    current_.emplace(msg_, k_, radius_, time);
    send_starts_.push_back(time);
  }
  return current_->act(time, rng);
}

void BroadcastRounds::end_slot(std::int64_t time) {
  if (current_ && time >= current_->last_slot()) {
    current_.reset();
    ++rounds_done_;
  }
}

BroadcastProgram::BroadcastProgram(const BroadcastConfig& cfg, double radius, bool initiator,
                                   Payload msg)
    : k_(cfg.k()),
      tau_(cfg.tau()),
      radius_(radius),
      informed_(initiator),
      informed_time_(initiator ? std::optional<std::int64_t>(-1) : std::nullopt),
      msg_(msg),
      rounds_(msg, k_, tau_, radius) {}

std::optional<Transmission> BroadcastProgram::act(const SlotContext& ctx) {
  if (!informed_) return std::nullopt;
  return rounds_.act(ctx.time, *ctx.rng);
}

void BroadcastProgram::observe(const SlotContext& ctx, const Observation& obs) {
  if (informed_) {
    rounds_.end_slot(ctx.time);
    return;
  }
  if (obs.kind == radiosim::Reception::message && obs.payload.tag == msg_.tag) {
    informed_ = true;
    informed_time_ = ctx.time;
    msg_ = obs.payload;
    rounds_ = BroadcastRounds(msg_, k_, tau_, radius_);
  }
}

NeighborLists star_graph(int d) {
  if (d < 1) throw std::invalid_argument("star_graph: d must be >= 1");
  NeighborLists g(static_cast<std::size_t>(d) + 1);
  for (int leaf = 1; leaf <= d; ++leaf) {
    g[0].push_back(static_cast<NodeId>(leaf));
    g[leaf].push_back(0);
  }
  return g;
}

StarSendResult run_star_send(int d, int T, double base, std::uint64_t seed,
                             radiosim::ProtocolTrace* trace_out) {
  const auto model = radiosim::ChannelModel::multihop(star_graph(d));
  radiosim::Programs programs;
  programs.reserve(static_cast<std::size_t>(d) + 1);
  programs.push_back(std::make_unique<ListenerProgram>(T));
  const SendConfig cfg{Payload{kData, 1}, T, base};
  for (int leaf = 1; leaf <= d; ++leaf) programs.push_back(std::make_unique<SendProgram>(cfg, -1.0));
  radiosim::RunOptions options;
  options.max_slots = static_cast<std::int64_t>(T) + 1;
  options.record_slots = trace_out != nullptr;
  auto trace = radiosim::run(model, programs, options, RngStream(seed));
  const auto& center = static_cast<const ListenerProgram&>(*programs[0]);
  StarSendResult result{center.heard(), trace.slot_count};
  if (trace_out) *trace_out = std::move(trace);
  return result;
}

BroadcastResult run_broadcast(const Network& net, const BroadcastConfig& cfg,
                              const std::vector<NodeId>& initiators, std::uint64_t seed,
                              std::int64_t max_slots, radiosim::ProtocolTrace* trace_out) {
  std::vector<std::uint8_t> is_initiator(net.size(), 0);
  for (NodeId v : initiators) {
    if (v >= net.size()) throw std::invalid_argument("run_broadcast: initiator out of range");
    is_initiator[v] = 1;
  }
  const auto model = radiosim::ChannelModel::multihop(net);
  radiosim::Programs programs;
  programs.reserve(net.size());
  const Payload msg{kData, 1};
  for (std::size_t v = 0; v < net.size(); ++v)
    programs.push_back(std::make_unique<BroadcastProgram>(cfg, net.radius(), is_initiator[v] != 0, msg));

  radiosim::RunOptions options;
  options.max_slots = max_slots;
  options.record_slots = trace_out != nullptr;
  auto trace = radiosim::run(model, programs, options, RngStream(seed));

  BroadcastResult result;
  result.slots = trace.slot_count;
  result.status = trace.status;
  const int k = cfg.k();
  for (const auto& prog : programs) {
    const auto& b = static_cast<const BroadcastProgram&>(*prog);
    if (b.informed()) {
      ++result.informed;
      result.last_informed = std::max(result.last_informed, *b.informed_time());
    }
    for (std::int64_t start : b.send_starts()) result.aligned = result.aligned && start % k == 1 % k;
  }
  if (trace_out) *trace_out = std::move(trace);
  return result;
}

}  // namespace meshinit::protocols
