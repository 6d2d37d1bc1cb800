#pragma once

#include <optional>
#include <span>
#include <vector>

#include "auv/graph/graph.h"

namespace auv::graph {

// Vertex sequence from start to destination.
using Route = std::vector<int>;

enum class Feasibility {
  Feasible = 0,
  WrongEndpoints = 1,
  MissingEdge = 2,
  RepeatedVertex = 3,
  RepeatedEdge = 4,
};

const char* to_string(Feasibility f);

Feasibility check_feasibility(const MissionGraph& g, std::span<const int> route);

// Seconds needed from every vertex to the destination (kInf if unreachable).
std::vector<double> time_to_destination(const MissionGraph& g);

// Fastest start->destination route, std::nullopt if disconnected.
std::optional<Route> min_time_route(const MissionGraph& g);

// Greedy priority walk from the start: always step to the adjacent vertex of
// highest priority that is neither on the current path nor known to be a
// dead end (ties to the lower id). A vertex with no such neighbor is closed
// and the walk backs up one step, so the result is always a simple path and
// the failure marker (nullopt) appears only when the destination is
// unreachable.
//
// With a finite time budget a neighbor is skipped when even the fastest
// continuation from it cannot arrive strictly before the budget; the walk may
// then fail although a route exists.
class RouteDecoder {
 public:
  explicit RouteDecoder(const MissionGraph& g, double time_budget_s = kInf);

  std::optional<Route> decode(std::span<const double> priorities) const;

  const MissionGraph& graph() const { return *graph_; }
  double time_budget() const { return budget_; }

 private:
  const MissionGraph* graph_;
  double budget_;
  std::vector<double> lower_bound_;
};

std::optional<Route> decode_priority_vector(const MissionGraph& g,
                                            std::span<const double> priorities);

// Priority vector that decodes back to `route` (route vertices from 100 down
// to 0 in order, everything else -100).
std::vector<double> encode_route(const MissionGraph& g, std::span<const int> route);

}  // namespace auv::graph
