#include "meshinit/sfr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meshinit::protocols {

namespace {

BroadcastConfig deconnexion_config(double epsilon, int p0) {
  BroadcastConfig cfg;
  cfg.epsilon = epsilon;
  cfg.delta_bound = 3 * static_cast<std::int64_t>(std::max(p0, 1));
  cfg.n_bound = std::int64_t{1} << (std::clamp(p0, 0, 61) + 1);
  return cfg;
}

std::int64_t probing_slots(int t) {
  // call i lasts i + 1 slots
  return static_cast<std::int64_t>(t) * (t + 1) / 2 + t;
}

// One BROADCAST: tau rounds, each at most 2k slots once aligned.
std::int64_t broadcast_span(const BroadcastConfig& cfg) {
  const std::int64_t k = cfg.k();
  return 2 * k * cfg.tau() + k;
}

}  // namespace

SfrProgram::SfrProgram(const limits::SfrSchedule& schedule, int p_cap)
    : schedule_(&schedule), p_cap_(p_cap), p_(schedule.initial_p()) {
  start_probing(0);
}

void SfrProgram::start_probing(std::int64_t next_time) {
  phase_ = SfrPhase::probing;
  history_.push_back(p_);
  t_ = schedule_->inner_loop_length(p_);
  call_ = 1;
  call_start_ = next_time;
  heard_in_call_ = false;
  counter_ = 0;
}

BroadcastRounds SfrProgram::make_broadcast(int p0) const {
  const BroadcastConfig cfg = deconnexion_config(schedule_->epsilon(), p0);
  return BroadcastRounds(Payload{kDeconnexion, p0}, cfg.k(), cfg.tau(), schedule_->radius(p0 - 1));
}

void SfrProgram::start_relay(int p0) {
  learned_ = p0;
  phase_ = SfrPhase::relaying;
  broadcast_.emplace(make_broadcast(p0));
  broadcasts_left_ = 1;
}

std::optional<Transmission> SfrProgram::act(const SlotContext& ctx) {
  switch (phase_) {
    case SfrPhase::probing: {
      const SendCall call(Payload{kRangeProbe, p_}, call_, schedule_->radius(p_), call_start_);
      return call.act(ctx.time, *ctx.rng);
    }
    case SfrPhase::isolated:
    case SfrPhase::relaying:
      return broadcast_->act(ctx.time, *ctx.rng);
    case SfrPhase::listening:
    case SfrPhase::done:
      break;
  }
  return std::nullopt;
}

void SfrProgram::observe(const SlotContext& ctx, const Observation& obs) {
  const bool message = obs.kind == radiosim::Reception::message;
  switch (phase_) {
    case SfrPhase::probing:
      if (message && obs.payload.tag == kDeconnexion) {
        start_relay(static_cast<int>(obs.payload.value));
        return;
      }
      if (message && obs.payload.tag == kRangeProbe) heard_in_call_ = true;
      if (ctx.time < call_start_ + call_) return;
      if (heard_in_call_) ++counter_;
      heard_in_call_ = false;
      call_start_ = ctx.time + 1;
      if (++call_ <= t_) return;
      if (counter_ == 0) {
        isolated_ = true;
        learned_ = p_;
        phase_ = SfrPhase::isolated;
        broadcasts_left_ = schedule_->c1();
        broadcast_.emplace(make_broadcast(p_));
      } else {
        phase_ = SfrPhase::listening;
        window_end_ = ctx.time + schedule_->c1() * schedule_->broadcast_budget(p_ - 1);
      }
      return;
    case SfrPhase::listening:
      if (message && obs.payload.tag == kDeconnexion) {
        start_relay(static_cast<int>(obs.payload.value));
        return;
      }
      if (ctx.time < window_end_) return;
      if (++p_ > p_cap_) {
        failed_ = true;
        phase_ = SfrPhase::done;
        return;
      }
      start_probing(ctx.time + 1);
      return;
    case SfrPhase::isolated:
    case SfrPhase::relaying:
      broadcast_->end_slot(ctx.time);
      if (!broadcast_->done()) return;
      if (--broadcasts_left_ > 0) {
        broadcast_.emplace(make_broadcast(*learned_));
        return;
      }
      broadcast_.reset();
      phase_ = SfrPhase::done;
      return;
    case SfrPhase::done:
      return;
  }
}

int default_p_cap(double r_max, std::size_t n) {
  const int base = std::max(1, static_cast<int>(std::ceil(std::log2(r_max))));
  return base + 2 * limits::ceil_log2(static_cast<std::int64_t>(std::max<std::size_t>(n, 1)));
}

std::int64_t sfr_slot_budget(const limits::SfrSchedule& schedule, int p_cap) {
  std::int64_t total = 0;
  const int c1 = schedule.c1();
  for (int p = schedule.initial_p(); p <= p_cap; ++p) {
    total += probing_slots(schedule.inner_loop_length(p));
    // isolated nodes broadcast, everyone else listens; relays may overrun the window
    const std::int64_t bc = broadcast_span(deconnexion_config(schedule.epsilon(), p));
    total += std::max<std::int64_t>(c1 * schedule.broadcast_budget(p - 1), c1 * bc) + bc;
  }
  return total + 1;
}

SfrResult run_sfr(const Network& net, double epsilon, double r_max, std::uint64_t seed,
                  const SfrOptions& options) {
  const limits::SfrSchedule schedule(net.area(), epsilon, r_max);
  const int cap = options.p_cap.value_or(default_p_cap(r_max, net.size()));
  if (cap < schedule.initial_p()) throw std::invalid_argument("run_sfr: p cap below the initial p");

  const auto model = radiosim::ChannelModel::multihop(net);
  radiosim::Programs programs;
  programs.reserve(net.size());
  for (std::size_t v = 0; v < net.size(); ++v) programs.push_back(std::make_unique<SfrProgram>(schedule, cap));

  radiosim::RunOptions run_options;
  run_options.max_slots = options.max_slots.value_or(sfr_slot_budget(schedule, cap));
  run_options.record_slots = options.trace != nullptr;
  auto trace = radiosim::run(model, programs, run_options, RngStream(seed));

  SfrResult result;
  result.slots = trace.slot_count;
  result.status = trace.status;
  result.learned.reserve(net.size());
  bool all_learned = true;
  for (const auto& prog : programs) {
    const auto& sfr = static_cast<const SfrProgram&>(*prog);
    result.learned.push_back(sfr.learned_p0());
    result.isolated.push_back(sfr.isolated() ? 1 : 0);
    result.p_history.push_back(sfr.p_history());
    if (sfr.failed()) ++result.failed_nodes;
    if (!sfr.learned_p0()) {
      all_learned = false;
      continue;
    }
    result.p_hat = std::max(result.p_hat.value_or(*sfr.learned_p0()), *sfr.learned_p0());
  }
  result.agreed = all_learned && trace.status == radiosim::RunStatus::terminated;
  if (result.agreed) {
    for (const auto& p : result.learned) result.agreed = result.agreed && *p == *result.p_hat;
  }
  if (options.trace) *options.trace = std::move(trace);
  return result;
}

}  // namespace meshinit::protocols
