#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "meshinit/send_broadcast.hpp"

namespace meshinit::protocols {

/// What a round of EQUIPARTITION revealed about one subset.
enum class SubsetStatus : std::uint8_t { unknown, empty, single, multi };

/// One station of INITIALIZATION on a single-hop channel with collision
/// detection. Every station sees every slot, so each keeps its own replica of
/// the partition stack and of Number; the replicas never diverge.
///
/// A top-level set whose first round shows exactly one occupied subset, and
/// that subset holds one station, is a singleton: that station takes Number.
class InitializationProgram final : public NodeProgram {
 public:
  /// single_call stops after the first EQUIPARTITION call succeeds.
  InitializationProgram(int k, std::int64_t number = 1, bool single_call = false,
                        SubsetStatus initial = SubsetStatus::unknown);

  std::optional<Transmission> act(const SlotContext& ctx) override;
  void observe(const SlotContext& ctx, const Observation& obs) override;
  bool terminated() const override { return done_; }

  std::optional<std::int64_t> id() const { return id_; }
  std::int64_t number() const { return number_; }
  /// Subset index (1..k) picked in the last round this station took part in.
  int last_choice() const { return choice_; }

  struct Participation {
    std::int64_t call = 0;    // global EQUIPARTITION call index, from 0
    std::int64_t rounds = 0;  // rounds that call needed
  };
  const std::vector<Participation>& participation() const { return participation_; }

 private:
  struct Entry {
    SubsetStatus status;
    bool mine;
  };

  void settle();

  int k_;
  std::int64_t number_;
  bool single_call_;
  bool done_ = false;
  std::optional<std::int64_t> id_;
  std::vector<Entry> stack_;
  std::vector<SubsetStatus> seen_;
  int offset_ = 0;  // slot within the current round, 0..k-1
  int choice_ = 0;
  std::int64_t call_ = 0;
  std::int64_t call_rounds_ = 0;
  std::vector<Participation> participation_;
};

struct EquipartitionCall {
  std::size_t m = 0;
  std::int64_t rounds = 0;
};

struct InitResult {
  std::vector<std::int64_t> ids;  // 0 = unassigned
  std::int64_t slots = 0;
  std::int64_t rounds = 0;
  std::vector<EquipartitionCall> calls;
  radiosim::RunStatus status = radiosim::RunStatus::terminated;
  bool bijection = false;
};

/// INITIALIZATION(S, k) for n stations starting together at TIME = 1.
InitResult initialize_single_hop(std::size_t n, int k, std::uint64_t seed,
                                 std::optional<std::int64_t> max_slots = std::nullopt,
                                 radiosim::ProtocolTrace* trace = nullptr);

struct EquipartitionResult {
  std::vector<int> subsets;                  // final subset index per station
  std::vector<std::optional<std::int64_t>> labels;
  std::int64_t number = 0;                   // Number after the call
  std::int64_t rounds = 0;
};

/// One EQUIPARTITION call over m >= 2 stations.
EquipartitionResult equipartition(std::size_t m, int k, std::int64_t number, std::uint64_t seed);

/// ids is exactly {1..n}.
bool is_bijection(std::span<const std::int64_t> ids);

}  // namespace meshinit::protocols
