#include <random>
#include <stdexcept>

#include "doctest.h"
#include "meshinit/radiosim.hpp"

using namespace meshinit;
using namespace meshinit::radiosim;

namespace {

std::vector<Emission> emit(std::initializer_list<NodeId> nodes) {
  std::vector<Emission> out;
  for (NodeId v : nodes) out.push_back(Emission{v, Payload{1, std::int64_t(v)}, -1.0});
  return out;
}

// Transmits once, at slot `when`.
class OneShot final : public NodeProgram {
 public:
  explicit OneShot(std::int64_t when) : when_(when) {}
  std::optional<Transmission> act(const SlotContext& ctx) override {
    if (ctx.time == when_) return Transmission{Payload{9, std::int64_t(ctx.node)}, -1.0};
    return std::nullopt;
  }
  void observe(const SlotContext& ctx, const Observation& obs) override {
    log.push_back(obs.kind);
    if (ctx.time >= when_) done_ = true;
  }
  bool terminated() const override { return done_; }
  std::vector<Reception> log;

 private:
  std::int64_t when_;
  bool done_ = false;
};

}  // namespace

TEST_CASE("multihop channel without collision detection") {
  // 0 - 1 - 2 on a line, 0 and 2 out of each other's range
  const NeighborLists g{{1}, {0, 2}, {1}};
  const auto model = ChannelModel::multihop(g);
  CHECK_FALSE(model.collision_detection());

  auto out = step(model, emit({0}));
  CHECK(out.receptions[1].kind == Reception::message);
  CHECK(out.receptions[1].payload == Payload{1, 0});
  CHECK(out.receptions[2].kind == Reception::silence);
  CHECK(out.receptions[0].kind == Reception::silence);

  out = step(model, emit({0, 2}));
  CHECK(out.receptions[1].kind == Reception::silence);  // collision looks like silence

  out = step(model, emit({0, 1}));
  CHECK(out.receptions[0].kind == Reception::silence);  // half duplex
  CHECK(out.receptions[1].kind == Reception::silence);
  CHECK(out.receptions[2].kind == Reception::message);
  CHECK(out.transmitters == std::vector<NodeId>{0, 1});

  CHECK_THROWS_AS(step(model, emit({1, 1})), std::invalid_argument);
  CHECK_THROWS_AS(step(model, emit({3})), std::invalid_argument);
}

TEST_CASE("single-hop channel with collision detection") {
  const auto model = ChannelModel::single_hop(4, true);
  auto out = step(model, emit({2}));
  CHECK(out.receptions[2].kind == Reception::silence);
  for (NodeId v : {0u, 1u, 3u}) CHECK(out.receptions[v].kind == Reception::message);

  out = step(model, emit({0, 3}));
  for (NodeId v = 0; v < 4; ++v) CHECK(out.receptions[v].kind == Reception::collision);

  const auto quiet = ChannelModel::single_hop(4, false);
  out = step(quiet, emit({0, 3}));
  for (NodeId v = 0; v < 4; ++v) CHECK(out.receptions[v].kind == Reception::silence);
}

TEST_CASE("geometric reception follows the transmitter radius") {
  const Network net(10.0, 1.0, 0, {{1, 1}, {2.5, 1}, {6, 1}});
  const auto model = ChannelModel::multihop(net);
  auto out = step(model, emit({0}));
  CHECK(out.receptions[1].kind == Reception::silence);
  std::vector<Emission> wide{Emission{0, Payload{1, 0}, 2.0}};
  out = step(model, wide);
  CHECK(out.receptions[1].kind == Reception::message);
  CHECK(out.receptions[2].kind == Reception::silence);
}

TEST_CASE("geometric resolution matches a brute-force oracle") {
  const auto net = generate_network(200, 7.0, 1.1, 17);
  Channel channel(ChannelModel::multihop(net));
  std::mt19937_64 gen(4);
  for (int round = 0; round < 200; ++round) {
    std::vector<Emission> ems;
    std::vector<double> radius(net.size(), -1.0);
    for (NodeId v = 0; v < net.size(); ++v)
      if (gen() % 10 == 0) {
        const double r = (gen() % 2) ? -1.0 : 0.5 + double(gen() % 100) / 50.0;
        ems.push_back(Emission{v, Payload{2, std::int64_t(v)}, r});
        radius[v] = r < 0.0 ? net.radius() : r;
      }
    const auto& out = channel.step(ems);
    for (NodeId v = 0; v < net.size(); ++v) {
      int heard = 0;
      NodeId from = 0;
      for (const auto& e : ems)
        if (e.node != v && squared_distance(net.node(e.node), net.node(v)) <= radius[e.node] * radius[e.node]) {
          ++heard;
          from = e.node;
        }
      const bool transmitting = radius[v] >= 0.0;
      if (!transmitting && heard == 1) {
        CHECK(out.receptions[v].kind == Reception::message);
        CHECK(out.receptions[v].payload.value == std::int64_t(from));
      } else {
        CHECK(out.receptions[v].kind == Reception::silence);
      }
    }
  }
}

TEST_CASE("run drives programs until they terminate") {
  const auto model = ChannelModel::single_hop(3, true);
  Programs progs;
  progs.push_back(std::make_unique<OneShot>(2));
  progs.push_back(std::make_unique<OneShot>(4));
  progs.push_back(std::make_unique<OneShot>(4));
  RunOptions opts;
  opts.max_slots = 100;
  opts.start_time = 1;
  opts.record_slots = true;
  const auto trace = run(model, progs, opts, RngStream(1));
  CHECK(trace.status == RunStatus::terminated);
  CHECK(trace.slot_count == 4);  // slots 1..4
  const auto& first = static_cast<const OneShot&>(*progs[0]);
  CHECK(first.log == std::vector<Reception>{Reception::silence, Reception::silence});
  const auto& second = static_cast<const OneShot&>(*progs[1]);
  CHECK(second.log == std::vector<Reception>{Reception::silence, Reception::message, Reception::silence,
                                            Reception::collision});

  Programs again;
  again.push_back(std::make_unique<OneShot>(50));
  RunOptions cap;
  cap.max_slots = 5;
  CHECK(run(ChannelModel::single_hop(1, true), again, cap, RngStream(1)).status == RunStatus::truncated);
}

TEST_CASE("random streams are pure functions of their coordinates") {
  const RngStream a(11), b(11), c(12);
  CHECK(a.bits(3, 7, 0) == b.bits(3, 7, 0));
  CHECK(a.bits(3, 7, 0) != c.bits(3, 7, 0));
  CHECK(a.bits(3, 7, 0) != a.bits(3, 7, 1));
  CHECK(a.bits(3, 7, 0) != a.bits(4, 7, 0));
  NodeRng r(a, 3, 7);
  CHECK(r.uniform() == a.uniform(3, 7, 0));
  for (int i = 0; i < 1000; ++i) CHECK(r.below(5) < 5u);
  CHECK(derive_seed(1, "x", 0) == derive_seed(1, "x", 0));
  CHECK(derive_seed(1, "x", 0) != derive_seed(1, "y", 0));
  CHECK(derive_seed(1, "x", 0) != derive_seed(1, "x", 1));
}
