#include "meshinit/geomnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace meshinit {

Network::Network(double side, double radius, std::uint64_t seed, std::vector<Point> nodes)
    : side_(side), radius_(radius), seed_(seed), nodes_(std::move(nodes)) {
  if (!(side > 0.0)) throw std::invalid_argument("Network: side must be positive");
  if (!(radius >= 0.0)) throw std::invalid_argument("Network: radius must be non-negative");
  for (const Point& p : nodes_) {
    if (!(p.x >= 0.0 && p.x <= side && p.y >= 0.0 && p.y <= side))
      throw std::invalid_argument("Network: node outside the square");
  }
}

Network Network::with_radius(double radius) const {
  return Network(side_, radius, seed_, nodes_);
}

Network generate_network(std::size_t n, double side, double radius, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_network: n must be >= 1");
  std::mt19937_64 engine(seed);
  // Explicit 53-bit conversion: std::uniform_real_distribution is not
  // specified bit-for-bit across standard libraries.
  auto unit = [&engine] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };
  std::vector<Point> nodes(n);
  for (auto& p : nodes) {
    p.x = unit() * side;
    p.y = unit() * side;
  }
  return Network(side, radius, seed, std::move(nodes));
}

SpatialGrid::SpatialGrid(std::span<const Point> points, double side, double cell_size)
    : points_(points) {
  if (!(side > 0.0)) throw std::invalid_argument("SpatialGrid: side must be positive");
  double cell = cell_size > 0.0 ? cell_size : side;
  double count = std::ceil(side / cell);
  count = std::clamp(count, 1.0, 1024.0);
  cells_ = static_cast<int>(count);
  cell_ = side / cells_;

  const std::size_t total = static_cast<std::size_t>(cells_) * cells_;
  std::vector<std::uint32_t> cell_of(points.size());
  start_.assign(total + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int gx = clamp_cell(points[i].x / cell_);
    const int gy = clamp_cell(points[i].y / cell_);
    cell_of[i] = static_cast<std::uint32_t>(gy) * cells_ + gx;
    ++start_[cell_of[i] + 1];
  }
  for (std::size_t c = 0; c < total; ++c) start_[c + 1] += start_[c];
  ids_.resize(points.size());
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) ids_[fill[cell_of[i]]++] = static_cast<NodeId>(i);
}

NeighborLists adjacency(const Network& net) {
  NeighborLists lists(net.size());
  if (net.size() < 2) return lists;
  const SpatialGrid grid(net.nodes(), net.side(), net.radius());
  for (NodeId v = 0; v < net.size(); ++v) {
    auto& out = lists[v];
    grid.for_each_within(net.node(v), net.radius(), [&](NodeId u) {
      if (u != v) out.push_back(u);
    });
    std::sort(out.begin(), out.end());
  }
  return lists;
}

std::vector<std::size_t> bfs_hops(const NeighborLists& graph, NodeId source) {
  constexpr auto kUnreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(graph.size(), kUnreached);
  std::vector<NodeId> queue;
  queue.reserve(graph.size());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId v = queue[head];
    for (NodeId u : graph[v]) {
      if (dist[u] == kUnreached) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

namespace {

// Eccentricity of `source`, or nullopt if some node is unreachable. Reuses
// caller-owned buffers because it runs once per node.
std::optional<std::size_t> eccentricity(const NeighborLists& graph, NodeId source,
                                        std::vector<std::uint32_t>& stamp, std::uint32_t mark,
                                        std::vector<NodeId>& queue,
                                        std::vector<std::uint32_t>& depth) {
  queue.clear();
  queue.push_back(source);
  stamp[source] = mark;
  depth[source] = 0;
  std::uint32_t far = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId v = queue[head];
    const std::uint32_t dv = depth[v];
    far = dv;
    for (NodeId u : graph[v]) {
      if (stamp[u] != mark) {
        stamp[u] = mark;
        depth[u] = dv + 1;
        queue.push_back(u);
      }
    }
  }
  if (queue.size() != graph.size()) return std::nullopt;
  return far;
}

}  // namespace

GraphStats graph_stats(const NeighborLists& graph, bool with_diameter) {
  GraphStats stats;
  const std::size_t n = graph.size();
  if (n == 0) return stats;
  stats.min_degree = std::numeric_limits<std::size_t>::max();
  for (const auto& nb : graph) {
    stats.min_degree = std::min(stats.min_degree, nb.size());
    stats.max_degree = std::max(stats.max_degree, nb.size());
    if (nb.empty()) ++stats.isolated_count;
  }
  if (n == 1) {
    stats.connected = true;
    stats.diameter_hops = 0;
    stats.isolated_count = 0;
    return stats;
  }
  std::vector<std::uint32_t> stamp(n, 0);
  std::vector<std::uint32_t> depth(n, 0);
  std::vector<NodeId> queue;
  queue.reserve(n);
  const auto first = eccentricity(graph, 0, stamp, 1, queue, depth);
  stats.connected = first.has_value();
  if (!stats.connected || !with_diameter) return stats;
  std::size_t diameter = *first;
  for (NodeId v = 1; v < n; ++v) {
    diameter = std::max(diameter, *eccentricity(graph, v, stamp, v + 1, queue, depth));
  }
  stats.diameter_hops = diameter;
  return stats;
}

GraphStats graph_stats(const Network& net, StatsOptions options) {
  GraphStats stats = graph_stats(adjacency(net), options.diameter);
  if (options.coverage) {
    const int probes = std::max(1, static_cast<int>(std::ceil(net.side())));
    const double pitch = net.side() / probes;
    const SpatialGrid grid(net.nodes(), net.side(), net.radius());
    std::size_t cover_min = std::numeric_limits<std::size_t>::max();
    for (int j = 0; j < probes; ++j) {
      for (int i = 0; i < probes; ++i) {
        const Point probe{(i + 0.5) * pitch, (j + 0.5) * pitch};
        std::size_t count = 0;
        grid.for_each_within(probe, net.radius(), [&count](NodeId) { ++count; });
        cover_min = std::min(cover_min, count);
      }
    }
    stats.coverage_min = cover_min;
  }
  return stats;
}

}  // namespace meshinit
