#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "meshinit/geomnet.hpp"
#include "meshinit/initialization.hpp"
#include "meshinit/limits.hpp"
#include "meshinit/sfr.hpp"

namespace meshinit::protocols {

struct PipelineOptions {
  std::optional<double> r_max;  // default: the network side
  int k = 3;
  int retry_cap = 5;
  SfrOptions sfr;
};

/// One pass of the emulated single-hop initialization.
struct PipelineAttempt {
  int bound_exponent = 0;     // bounds are upper_bounds_from_p0(bound_exponent)
  int radius_exponent = 0;    // nodes operate at R(radius_exponent)
  limits::UpperBounds bounds;
  bool bounds_hold = false;   // connected at that radius, n <= n_max and D <= diam_max
  bool degree_within = false;  // max degree <= delta_max; reported, not enforced
  std::int64_t emulated_slots = 0;
  std::int64_t slot_cost = 0;  // broadcast_time charged per emulated slot
  std::int64_t charged = 0;
};

struct PipelineResult {
  std::vector<std::int64_t> ids;
  int p_hat = 0;
  bool sfr_agreed = false;
  std::int64_t sfr_slots = 0;
  std::int64_t total_slots = 0;  // SFR slots + charged emulation slots
  std::vector<PipelineAttempt> attempts;
};

/// Step 1 runs SFR. Step 2 runs single-hop INITIALIZATION through an ideal
/// emulation that resolves every slot globally and charges
/// broadcast_time(D, N, Delta, eps) slots for it. Step 3 accepts the
/// assignment only if it is a bijection and the advertised bounds hold for
/// the real network. Otherwise the bounds exponent grows by one (n_max
/// doubles) and Step 2 reruns; a disconnected network also grows the radius
/// (by 1, 2, 4, ... exponent steps). Throws std::runtime_error after
/// retry_cap retries.
PipelineResult initialize_multihop(const Network& net, double epsilon, std::uint64_t seed,
                                   const PipelineOptions& options = {});

}  // namespace meshinit::protocols
