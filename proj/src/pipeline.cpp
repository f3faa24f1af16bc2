#include "meshinit/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "meshinit/rng.hpp"

namespace meshinit::protocols {

PipelineResult initialize_multihop(const Network& net, double epsilon, std::uint64_t seed,
                                   const PipelineOptions& options) {
  const double r_max = options.r_max.value_or(net.side());
  const std::size_t n = net.size();
  PipelineResult result;

  if (n == 1) {
    result.ids = {1};
    return result;
  }

  const SfrResult sfr = run_sfr(net, epsilon, r_max, derive_seed(seed, "sfr", 0), options.sfr);
  result.sfr_slots = sfr.slots;
  result.sfr_agreed = sfr.agreed;
  result.p_hat = sfr.p_hat.value_or(options.sfr.p_cap.value_or(default_p_cap(r_max, n)));
  result.total_slots = sfr.slots;

  const limits::SfrSchedule schedule(net.area(), epsilon, r_max);
  int bound_exp = std::max(result.p_hat, 2);
  int radius_exp = result.p_hat - 1;
  int backoff = 1;

  for (int attempt = 0; attempt <= options.retry_cap; ++attempt) {
    PipelineAttempt a;
    a.bound_exponent = bound_exp;
    a.radius_exponent = radius_exp;
    a.bounds = limits::upper_bounds_from_p0(bound_exp);

    const GraphStats stats = graph_stats(net.with_radius(schedule.radius(radius_exp)), StatsOptions{true, false});
    a.bounds_hold = stats.connected && static_cast<std::int64_t>(n) <= a.bounds.n_max &&
                    static_cast<std::int64_t>(*stats.diameter_hops) <= a.bounds.diam_max;
    a.degree_within = static_cast<std::int64_t>(stats.max_degree) <= a.bounds.delta_max;

    const InitResult init = initialize_single_hop(n, options.k, derive_seed(seed, "emulation", attempt));
    a.emulated_slots = init.slots;
    a.slot_cost = limits::broadcast_time(a.bounds.diam_max, a.bounds.n_max, a.bounds.delta_max, epsilon);
    a.charged = a.emulated_slots * a.slot_cost;
    result.total_slots += a.charged;
    result.attempts.push_back(a);

    if (a.bounds_hold && init.status == radiosim::RunStatus::terminated && init.bijection) {
      result.ids = init.ids;
      return result;
    }
    if (!stats.connected) {
      // back off the radius, doubling the step on each disconnect
      radius_exp = std::max(radius_exp - backoff, 0);
      backoff *= 2;
      ++bound_exp;
    } else {
      ++bound_exp;
    }
  }
  throw std::runtime_error("initialize_multihop: no valid assignment after the retry cap");
}

}  // namespace meshinit::protocols
