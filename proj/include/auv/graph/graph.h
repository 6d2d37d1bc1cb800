#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "auv/common.h"
#include "auv/env/terrain.h"

namespace auv::graph {

struct Task {
  int id = 0;
  double weight = 1.0;
};

// Normal(mean, std) weights, redrawn until positive. std == 0 yields exactly
// `mean` (which must then be positive).
std::vector<Task> sample_tasks(std::uint64_t seed, int count = 30, double mean = 20.0,
                               double std = 10.0);

inline constexpr int kNoTask = -1;

struct Edge {
  int a = 0;
  int b = 0;
  int task = kNoTask;
  double weight = 1.0;
  double distance_m = 0.0;
  double time_s = 0.0;

  int other(int v) const { return v == a ? b : a; }
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Undirected waypoint graph with at most one edge per vertex pair. Distances
// and traversal times are always derived from the waypoint positions.
class MissionGraph {
 public:
  // Only a, b, task and weight are read from `edges`.
  MissionGraph(std::vector<Vec3> waypoints, std::vector<Edge> edges, int start, int destination,
               double speed_mps);

  int vertex_count() const { return static_cast<int>(waypoints_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int start() const { return start_; }
  int destination() const { return destination_; }
  double speed() const { return speed_; }

  const Vec3& waypoint(int v) const { return waypoints_[static_cast<std::size_t>(v)]; }
  const std::vector<Vec3>& waypoints() const { return waypoints_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  const std::vector<Edge>& edges() const { return edges_; }

  // -1 when a and b are not adjacent.
  int edge_index(int a, int b) const;
  const Edge* find_edge(int a, int b) const;
  // Sorted by vertex id.
  const std::vector<int>& neighbors(int v) const { return adjacency_[static_cast<std::size_t>(v)]; }

  bool connected() const;
  int task_edge_count() const;

  // Copy for re-planning: the route starts at new_start, `removed` vertices
  // lose all their edges and edges carrying a completed task revert to
  // weight 1.
  MissionGraph restricted(int new_start, std::span<const int> removed,
                          std::span<const int> completed_tasks) const;

 private:
  std::vector<Vec3> waypoints_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> index_;  // dense vertex-pair -> edge table
  int start_;
  int destination_;
  double speed_;
};

struct GraphParams {
  int node_count = 40;
  // Fraction of all vertex pairs that become edges; the spanning tree is kept
  // even when the budget is smaller.
  double edge_density = 0.1;
  double speed_mps = 2.0;
  // New spanning-tree vertices attach to one of this many nearest placed
  // vertices.
  int neighbor_pool = 4;
  int placement_attempts = 10000;
  // Optional template positions (x, y); each waypoint is drawn around its
  // template entry with Gaussian jitter instead of uniformly.
  std::vector<Vec2> base_layout;
  double jitter_sigma_m = 0.0;
};

MissionGraph build_graph(const env::TerrainGrid& grid, const GraphParams& params,
                         std::span<const Task> tasks, std::uint64_t seed);

// Line-oriented text form; parse recomputes distances and times and rejects
// files whose stored values disagree.
void write_graph(const MissionGraph& g, std::ostream& out);
MissionGraph read_graph(std::istream& in);

}  // namespace auv::graph
