#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "meshinit/initialization.hpp"
#include "meshinit/limits.hpp"
#include "meshinit/pipeline.hpp"
#include "meshinit/send_broadcast.hpp"
#include "meshinit/sfr.hpp"

using namespace meshinit;
using namespace meshinit::protocols;

namespace {

double product_oracle(int T, int d) {
  double fail = 1.0;
  for (int i = 0; i <= T; ++i) {
    const double q = std::ldexp(1.0, -i);
    fail *= 1.0 - d * q * std::pow(1.0 - q, d - 1);
  }
  return 1.0 - fail;
}

Network line(std::size_t n, double spacing, double radius) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({0.5 + spacing * double(i), 0.5});
  return Network(1.0 + spacing * double(n), radius, 0, pts);
}

}  // namespace

TEST_CASE("SEND on a star: deterministic corners") {
  // T = 0 means one slot with probability 1
  CHECK(run_star_send(1, 0, 2.0, 1).center_heard);
  CHECK_FALSE(run_star_send(2, 0, 2.0, 1).center_heard);
  CHECK(run_star_send(3, 6, 2.0, 1).slots == 7);
  const auto g = star_graph(3);
  CHECK(g[0] == std::vector<NodeId>{1, 2, 3});
  CHECK(g[2] == std::vector<NodeId>{0});
}

TEST_CASE("SEND on a star matches the exact product") {
  const int trials = 3000;
  for (auto [T, d] : {std::pair{10, 4}, {6, 20}}) {
    int hits = 0;
    for (int t = 0; t < trials; ++t) hits += run_star_send(d, T, 2.0, derive_seed(5, "star", t)).center_heard;
    const double p = product_oracle(T, d);
    CHECK(std::abs(double(hits) / trials - p) <= 4.0 * std::sqrt(p * (1 - p) / trials));
  }
}

TEST_CASE("broadcast parameters") {
  const BroadcastConfig cfg{0.01, 9, 100};
  CHECK(cfg.k() == 8);
  CHECK(cfg.tau() == 14);
  CHECK_THROWS(BroadcastConfig{0.01, 1, 100}.k());
}

TEST_CASE("BROADCAST between two nodes") {
  const Network net(2.0, 1.5, 0, {{0.25, 1.0}, {1.25, 1.0}});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto res = run_broadcast(net, BroadcastConfig{0.01, 2, 2}, {0}, seed, 100000);
    CHECK(res.status == radiosim::RunStatus::terminated);
    CHECK(res.informed == 2);
    CHECK(res.aligned);
    CHECK(res.last_informed >= 1);
  }
}

TEST_CASE("BROADCAST along a path informs everyone within the delivery bound") {
  const auto net = line(8, 1.0, 1.0);
  const BroadcastConfig cfg{0.01, 2, 8};
  const auto bound = limits::broadcast_delivery_time(7, 8, 2, 0.01);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto res = run_broadcast(net, cfg, {0}, seed, 1000000);
    CHECK(res.informed == 8);
    CHECK(res.aligned);
    CHECK(res.last_informed <= bound);
  }
  // disconnected node never learns
  const auto cut = line(3, 2.0, 1.0);
  CHECK(run_broadcast(cut, cfg, {0}, 1, 100000).informed == 1);
}

TEST_CASE("SFR on a single node isolates at the first range") {
  const Network net(4.0, 0.0, 0, {{2.0, 2.0}});
  const auto res = run_sfr(net, 0.1, 4.0, 3);
  const limits::SfrSchedule s(16.0, 0.1, 4.0);
  CHECK(res.status == radiosim::RunStatus::terminated);
  CHECK(res.agreed);
  REQUIRE(res.p_hat);
  CHECK(*res.p_hat == s.initial_p());
  CHECK(res.isolated[0] == 1);
}

TEST_CASE("SFR on a small random network") {
  const auto net = generate_network(64, 8.0, 1.0, 21);
  const auto a = run_sfr(net, 0.05, 8.0, 9);
  const auto b = run_sfr(net, 0.05, 8.0, 9);
  CHECK(a.status == radiosim::RunStatus::terminated);
  CHECK(a.slots == b.slots);
  CHECK(a.learned == b.learned);
  REQUIRE(a.p_hat);
  CHECK(*a.p_hat >= 3);
  CHECK(a.slots <= sfr_slot_budget(limits::SfrSchedule(64.0, 0.05, 8.0), default_p_cap(8.0, 64)));
  std::size_t isolated = 0;
  for (auto v : a.isolated) isolated += v;
  CHECK(isolated >= 1);
  for (const auto& h : a.p_history) {
    REQUIRE_FALSE(h.empty());
    CHECK(std::is_sorted(h.begin(), h.end()));
  }
}

TEST_CASE("SFR respects the p cap") {
  // two nodes well within range at every radius keep hearing each other
  const Network net(64.0, 0.0, 0, {{32.0, 32.0}, {32.0, 32.001}});
  SfrOptions opts;
  opts.p_cap = 8;
  const auto res = run_sfr(net, 0.1, 64.0, 1, opts);
  CHECK(res.failed_nodes == 2);
  CHECK_FALSE(res.p_hat);
  CHECK_FALSE(res.agreed);
  for (const auto& h : res.p_history) CHECK(h.back() == 8);
}

TEST_CASE("EQUIPARTITION of two stations labels both in subset order") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto res = equipartition(2, 3, 10, seed);
    REQUIRE(res.subsets.size() == 2);
    CHECK(res.subsets[0] != res.subsets[1]);
    const std::size_t lower = res.subsets[0] < res.subsets[1] ? 0 : 1;
    CHECK(res.labels[lower] == 10);
    CHECK(res.labels[1 - lower] == 11);
    CHECK(res.number == 12);
    CHECK(res.rounds >= 1);
  }
  CHECK_THROWS(equipartition(1, 3, 1, 1));
}

TEST_CASE("INITIALIZATION produces a bijection") {
  CHECK(initialize_single_hop(1, 3, 1).ids == std::vector<std::int64_t>{1});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto two = initialize_single_hop(2, 3, seed);
    CHECK(two.bijection);
    CHECK(two.status == radiosim::RunStatus::terminated);
  }
  for (int k : {2, 3, 5}) {
    const auto res = initialize_single_hop(100, k, 77);
    CHECK(res.bijection);
    std::set<std::int64_t> ids(res.ids.begin(), res.ids.end());
    CHECK(ids.size() == 100);
    CHECK(res.rounds * k <= res.slots + k);
  }
  CHECK_THROWS(initialize_single_hop(5, 1, 1));
  CHECK(is_bijection(std::vector<std::int64_t>{2, 1, 3}));
  CHECK_FALSE(is_bijection(std::vector<std::int64_t>{1, 1, 3}));
  CHECK_FALSE(is_bijection(std::vector<std::int64_t>{0, 1}));
}

TEST_CASE("INITIALIZATION stops at the slot cap") {
  const auto res = initialize_single_hop(50, 3, 1, 10);
  CHECK(res.status == radiosim::RunStatus::truncated);
  CHECK(res.slots == 10);
  CHECK_FALSE(res.bijection);
}

TEST_CASE("multihop pipeline") {
  const Network one(1.0, 0.5, 0, {{0.5, 0.5}});
  CHECK(initialize_multihop(one, 0.1, 1).ids == std::vector<std::int64_t>{1});

  const double side = std::sqrt(120.0);
  const double r = limits::r_superconnectivity({120.0, 120.0, 1.0, 0.0});
  const auto net = generate_network(120, side, r, 4);
  const auto res = initialize_multihop(net, 0.01, 8);
  CHECK(is_bijection(res.ids));
  REQUIRE_FALSE(res.attempts.empty());
  const auto& last = res.attempts.back();
  CHECK(last.bounds_hold);
  CHECK(last.charged == last.emulated_slots * last.slot_cost);
  std::int64_t total = res.sfr_slots;
  for (const auto& a : res.attempts) total += a.charged;
  CHECK(total == res.total_slots);
}
