#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "meshinit/geomnet.hpp"
#include "meshinit/limits.hpp"
#include "meshinit/send_broadcast.hpp"

namespace meshinit::protocols {

enum class SfrPhase { probing, isolated, listening, relaying, done };

/// Search-for-range. Every node starts at p = schedule.initial_p() and
/// shrinks its radius R(p) until some nodes hear no probe; those broadcast
/// "Deconnexion p" C1 times over R(p - 1) and exit with p. Everyone else
/// listens for C1 B(p - 1) slots, then either adopts the advertised value or
/// moves on to p + 1.
///
/// Listeners that hear a deconnexion message relay it for one BROADCAST
/// (tau rounds at the advertised R(p - 1)) before exiting, so the advertisement
/// crosses more than one hop. A deconnexion message heard while probing is
/// adopted the same way.
class SfrProgram final : public NodeProgram {
 public:
  SfrProgram(const limits::SfrSchedule& schedule, int p_cap);

  std::optional<Transmission> act(const SlotContext& ctx) override;
  void observe(const SlotContext& ctx, const Observation& obs) override;
  bool terminated() const override { return phase_ == SfrPhase::done; }

  SfrPhase phase() const { return phase_; }
  int p() const { return p_; }
  bool isolated() const { return isolated_; }
  /// True when p passed the cap without a deconnexion event.
  bool failed() const { return failed_; }
  std::optional<int> learned_p0() const { return learned_; }
  /// Every p this node probed with, in order.
  const std::vector<int>& p_history() const { return history_; }

 private:
  void start_probing(std::int64_t next_time);
  void start_relay(int p0);
  BroadcastRounds make_broadcast(int p0) const;

  const limits::SfrSchedule* schedule_;
  int p_cap_;
  SfrPhase phase_ = SfrPhase::probing;
  int p_;
  bool isolated_ = false;
  bool failed_ = false;
  std::optional<int> learned_;
  std::vector<int> history_;

  // probing
  int t_ = 0;
  int call_ = 0;
  std::int64_t call_start_ = 0;
  bool heard_in_call_ = false;
  int counter_ = 0;

  // listening
  std::int64_t window_end_ = 0;

  // isolated / relaying
  std::optional<BroadcastRounds> broadcast_;
  int broadcasts_left_ = 0;
};

struct SfrResult {
  std::vector<std::optional<int>> learned;  // per node
  std::vector<std::uint8_t> isolated;       // per node
  bool agreed = false;                      // every node learned the same value
  std::optional<int> p_hat;                 // largest learned value
  std::size_t failed_nodes = 0;             // passed the p cap
  std::int64_t slots = 0;
  radiosim::RunStatus status = radiosim::RunStatus::terminated;
  std::vector<std::vector<int>> p_history;
};

struct SfrOptions {
  std::optional<int> p_cap;  // default ceil(log2 r_max) + 2 ceil(log2 n)
  std::optional<std::int64_t> max_slots;
  radiosim::ProtocolTrace* trace = nullptr;  // filled with every slot when set
};

int default_p_cap(double r_max, std::size_t n);

/// Upper bound on the slots SFR can use before every node passes p_cap.
std::int64_t sfr_slot_budget(const limits::SfrSchedule& schedule, int p_cap);

SfrResult run_sfr(const Network& net, double epsilon, double r_max, std::uint64_t seed,
                  const SfrOptions& options = {});

}  // namespace meshinit::protocols
