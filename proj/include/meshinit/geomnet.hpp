#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace meshinit {

using NodeId = std::uint32_t;
using NeighborLists = std::vector<std::vector<NodeId>>;

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

inline double squared_distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Nodes on the square [0, side]^2 with a common transmission range.
/// Node indices are simulation bookkeeping only; protocols never see them.
class Network {
 public:
  Network(double side, double radius, std::uint64_t seed, std::vector<Point> nodes);

  double side() const { return side_; }
  double area() const { return side_ * side_; }
  double radius() const { return radius_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return nodes_.size(); }
  std::span<const Point> nodes() const { return nodes_; }
  Point node(NodeId v) const { return nodes_[v]; }

  /// Same positions at another range.
  Network with_radius(double radius) const;

  bool operator==(const Network&) const = default;

 private:
  double side_;
  double radius_;
  std::uint64_t seed_;
  std::vector<Point> nodes_;
};

/// n i.i.d. uniform points on [0, side]^2; bit-identical for identical arguments.
Network generate_network(std::size_t n, double side, double radius, std::uint64_t seed);

/// Uniform bucket grid over the square for disk queries of any radius.
class SpatialGrid {
 public:
  SpatialGrid(std::span<const Point> points, double side, double cell_size);

  /// Calls f(v) for every point v with squared distance to c at most r^2.
  template <class F>
  void for_each_within(Point c, double r, F&& f) const {
    if (r < 0.0) return;
    const double r2 = r * r;
    const int x0 = clamp_cell((c.x - r) / cell_);
    const int x1 = clamp_cell((c.x + r) / cell_);
    const int y0 = clamp_cell((c.y - r) / cell_);
    const int y1 = clamp_cell((c.y + r) / cell_);
    for (int gy = y0; gy <= y1; ++gy) {
      for (int gx = x0; gx <= x1; ++gx) {
        const std::size_t cell = static_cast<std::size_t>(gy) * cells_ + gx;
        for (std::uint32_t k = start_[cell]; k < start_[cell + 1]; ++k) {
          const NodeId v = ids_[k];
          if (squared_distance(points_[v], c) <= r2) f(v);
        }
      }
    }
  }

 private:
  int clamp_cell(double coord) const {
    if (!(coord > 0.0)) return 0;
    const double last = static_cast<double>(cells_ - 1);
    return coord >= last ? cells_ - 1 : static_cast<int>(coord);
  }

  std::span<const Point> points_;
  double cell_;
  int cells_;
  std::vector<std::uint32_t> start_;
  std::vector<NodeId> ids_;
};

/// Neighbor lists of the reachability graph, each sorted ascending.
/// u ~ v iff u != v and |u - v|^2 <= radius^2.
NeighborLists adjacency(const Network& net);

struct GraphStats {
  bool connected = false;
  std::size_t min_degree = 0;
  std::size_t max_degree = 0;
  std::size_t isolated_count = 0;
  std::optional<std::size_t> diameter_hops;  // empty means infinite
  std::size_t coverage_min = 0;
};

struct StatsOptions {
  bool diameter = true;
  bool coverage = true;
};

/// Connectivity, degree extremes, hop diameter (BFS from every node) and the
/// minimum number of disks covering a point of a ceil(side) x ceil(side) probe grid.
GraphStats graph_stats(const Network& net, StatsOptions options = {});

/// Same measurements on an explicit graph (coverage is left at 0).
GraphStats graph_stats(const NeighborLists& graph, bool with_diameter = true);

/// Hop distances from `source`; unreachable nodes get SIZE_MAX.
std::vector<std::size_t> bfs_hops(const NeighborLists& graph, NodeId source);

}  // namespace meshinit
