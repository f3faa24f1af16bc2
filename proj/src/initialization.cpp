#include "meshinit/initialization.hpp"

#include <map>
#include <stdexcept>

namespace meshinit::protocols {

InitializationProgram::InitializationProgram(int k, std::int64_t number, bool single_call,
                                             SubsetStatus initial)
    : k_(k), number_(number), single_call_(single_call) {
  if (k < 2) throw std::invalid_argument("INITIALIZATION: k must be >= 2");
  stack_.push_back(Entry{initial, true});
  seen_.assign(static_cast<std::size_t>(k), SubsetStatus::empty);
}

std::optional<Transmission> InitializationProgram::act(const SlotContext& ctx) {
  if (done_ || !stack_.back().mine) return std::nullopt;
  if (offset_ == 0) choice_ = static_cast<int>(ctx.rng->below(static_cast<std::uint32_t>(k_))) + 1;
  if (offset_ + 1 != choice_) return std::nullopt;
  return Transmission{Payload{kStation, 0}, -1.0};
}

void InitializationProgram::observe(const SlotContext&, const Observation& obs) {
  if (done_) return;
  switch (obs.kind) {
    case radiosim::Reception::silence:
      // a lone transmitter senses silence too
      seen_[offset_] = (stack_.back().mine && choice_ == offset_ + 1) ? SubsetStatus::single
                                                                     : SubsetStatus::empty;
      break;
    case radiosim::Reception::message:
      seen_[offset_] = SubsetStatus::single;
      break;
    case radiosim::Reception::collision:
      seen_[offset_] = SubsetStatus::multi;
      break;
  }
  if (++offset_ < k_) return;
  offset_ = 0;
  ++call_rounds_;

  int occupied = 0;
  for (SubsetStatus s : seen_) occupied += s != SubsetStatus::empty;
  const bool member = stack_.back().mine;

  if (occupied >= 2) {
    if (member) participation_.push_back(Participation{call_, call_rounds_});
    stack_.pop_back();
    for (int i = 1; i <= k_; ++i) {
      const SubsetStatus s = seen_[static_cast<std::size_t>(i - 1)];
      const bool mine = member && choice_ == i;
      if (s == SubsetStatus::single) {
        if (mine) id_ = number_;
        ++number_;
      }
      stack_.push_back(Entry{s, mine && s != SubsetStatus::single});
    }
  } else if (occupied == 1 && [&] {
               for (SubsetStatus s : seen_)
                 if (s == SubsetStatus::single) return true;
               return false;
             }()) {
    // the whole set is one station
    if (member) {
      participation_.push_back(Participation{call_, call_rounds_});
      id_ = number_;
    }
    ++number_;
    stack_.pop_back();
  } else if (occupied == 0) {
    stack_.pop_back();
  } else {
    return;  // every station landed in the same subset: repeat the round
  }
  ++call_;
  call_rounds_ = 0;
  if (single_call_) {
    done_ = true;
    return;
  }
  settle();
}

void InitializationProgram::settle() {
  while (!stack_.empty() &&
         (stack_.back().status == SubsetStatus::empty || stack_.back().status == SubsetStatus::single))
    stack_.pop_back();
  if (stack_.empty() || id_) done_ = true;
}

bool is_bijection(std::span<const std::int64_t> ids) {
  std::vector<std::uint8_t> hit(ids.size() + 1, 0);
  for (std::int64_t id : ids) {
    if (id < 1 || id > static_cast<std::int64_t>(ids.size()) || hit[id]) return false;
    hit[id] = 1;
  }
  return true;
}

InitResult initialize_single_hop(std::size_t n, int k, std::uint64_t seed,
                                 std::optional<std::int64_t> max_slots,
                                 radiosim::ProtocolTrace* trace_out) {
  if (n < 1) throw std::invalid_argument("initialize_single_hop: n must be >= 1");
  const auto model = radiosim::ChannelModel::single_hop(n, true);
  radiosim::Programs programs;
  programs.reserve(n);
  for (std::size_t v = 0; v < n; ++v) programs.push_back(std::make_unique<InitializationProgram>(k));

  radiosim::RunOptions options;
  options.start_time = 1;
  options.max_slots = max_slots.value_or(64 * static_cast<std::int64_t>(k) * (static_cast<std::int64_t>(n) + 1));
  options.record_slots = trace_out != nullptr;
  auto trace = radiosim::run(model, programs, options, RngStream(seed));

  InitResult result;
  result.slots = trace.slot_count;
  result.status = trace.status;
  result.ids.reserve(n);
  std::map<std::int64_t, EquipartitionCall> calls;
  for (const auto& prog : programs) {
    const auto& init = static_cast<const InitializationProgram&>(*prog);
    result.ids.push_back(init.id().value_or(0));
    for (const auto& part : init.participation()) {
      auto& call = calls[part.call];
      ++call.m;
      call.rounds = part.rounds;
    }
  }
  for (const auto& [index, call] : calls) {
    result.calls.push_back(call);
    result.rounds += call.rounds;
  }
  result.bijection = is_bijection(result.ids);
  if (trace_out) *trace_out = std::move(trace);
  return result;
}

EquipartitionResult equipartition(std::size_t m, int k, std::int64_t number, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("equipartition: needs at least two stations");
  const auto model = radiosim::ChannelModel::single_hop(m, true);
  radiosim::Programs programs;
  programs.reserve(m);
  for (std::size_t v = 0; v < m; ++v)
    programs.push_back(std::make_unique<InitializationProgram>(k, number, true, SubsetStatus::multi));

  radiosim::RunOptions options;
  options.start_time = 1;
  options.max_slots = 1'000'000 * static_cast<std::int64_t>(k);
  const auto trace = radiosim::run(model, programs, options, RngStream(seed));
  if (trace.status != radiosim::RunStatus::terminated)
    throw std::runtime_error("equipartition: no successful split within the slot cap");

  EquipartitionResult result;
  result.rounds = trace.slot_count / k;
  for (const auto& prog : programs) {
    const auto& init = static_cast<const InitializationProgram&>(*prog);
    result.subsets.push_back(init.last_choice());
    result.labels.push_back(init.id());
    result.number = init.number();
  }
  return result;
}

}  // namespace meshinit::protocols
