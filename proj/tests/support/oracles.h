#pragma once

// Independent reference computations shared by unit and acceptance tests.

#include <cmath>
#include <functional>
#include <vector>

#include "auv/env/terrain.h"
#include "auv/graph/graph.h"
#include "auv/graph/route.h"

namespace oracle {

using auv::graph::MissionGraph;
using auv::graph::Route;

// Every simple start->destination path, by plain DFS.
inline std::vector<Route> all_simple_paths(const MissionGraph& g) {
  std::vector<Route> out;
  Route path{g.start()};
  std::vector<bool> on(static_cast<std::size_t>(g.vertex_count()), false);
  on[static_cast<std::size_t>(g.start())] = true;
  std::function<void()> dfs = [&] {
    int v = path.back();
    if (v == g.destination()) {
      out.push_back(path);
      return;
    }
    for (const auto& e : g.edges()) {
      int u = e.a == v ? e.b : (e.b == v ? e.a : -1);
      if (u < 0 || on[static_cast<std::size_t>(u)]) continue;
      on[static_cast<std::size_t>(u)] = true;
      path.push_back(u);
      dfs();
      path.pop_back();
      on[static_cast<std::size_t>(u)] = false;
    }
  };
  dfs();
  return out;
}

struct PathStats {
  double time = 0.0;
  double weight = 0.0;
};

inline PathStats stats(const MissionGraph& g, const Route& r) {
  PathStats s;
  for (std::size_t i = 1; i < r.size(); ++i) {
    for (const auto& e : g.edges()) {
      if ((e.a == r[i - 1] && e.b == r[i]) || (e.b == r[i - 1] && e.a == r[i])) {
        double d = (g.waypoint(e.a) - g.waypoint(e.b)).norm();
        s.time += d / g.speed();
        s.weight += e.weight;
      }
    }
  }
  return s;
}

// Route cost written out independently: |T - Tt| / Tt + 1 / W, infinite
// at or above the threshold.
inline double route_cost(const MissionGraph& g, const Route& r, double threshold) {
  auto s = stats(g, r);
  if (s.time >= threshold) return INFINITY;
  return std::abs(s.time - threshold) / threshold + 1.0 / s.weight;
}

inline double best_cost(const MissionGraph& g, double threshold) {
  double best = INFINITY;
  for (const auto& r : all_simple_paths(g)) best = std::min(best, route_cost(g, r, threshold));
  return best;
}

inline double longest_simple_time(const MissionGraph& g) {
  double t = 0.0;
  for (const auto& r : all_simple_paths(g)) t = std::max(t, stats(g, r).time);
  return t;
}

inline auv::env::TerrainGrid open_water(std::size_t cells = 10, double cell = 100.0) {
  return auv::env::TerrainGrid::uniform(cells, cells, cell, 100.0, auv::env::CellClass::Water);
}

}  // namespace oracle
