#include "auv/graph/route.h"

#include <algorithm>
#include <functional>
#include <queue>

namespace auv::graph {

const char* to_string(Feasibility f) {
  switch (f) {
    case Feasibility::Feasible: return "feasible";
    case Feasibility::WrongEndpoints: return "wrong endpoints";
    case Feasibility::MissingEdge: return "missing edge";
    case Feasibility::RepeatedVertex: return "repeated vertex";
    case Feasibility::RepeatedEdge: return "repeated edge";
  }
  return "?";
}

Feasibility check_feasibility(const MissionGraph& g, std::span<const int> route) {
  if (route.empty() || route.front() != g.start() || route.back() != g.destination()) {
    return Feasibility::WrongEndpoints;
  }
  std::vector<bool> seen_vertex(static_cast<std::size_t>(g.vertex_count()), false);
  std::vector<bool> seen_edge(static_cast<std::size_t>(g.edge_count()), false);
  for (std::size_t i = 0; i < route.size(); ++i) {
    const int v = route[i];
    if (v < 0 || v >= g.vertex_count()) return Feasibility::MissingEdge;
    if (seen_vertex[static_cast<std::size_t>(v)]) return Feasibility::RepeatedVertex;
    seen_vertex[static_cast<std::size_t>(v)] = true;
    if (i == 0) continue;
    const int e = g.edge_index(route[i - 1], v);
    if (e < 0) return Feasibility::MissingEdge;
    if (seen_edge[static_cast<std::size_t>(e)]) return Feasibility::RepeatedEdge;
    seen_edge[static_cast<std::size_t>(e)] = true;
  }
  return Feasibility::Feasible;
}

namespace {

// Dijkstra over edge times from `source`; prev[v] is the predecessor.
std::vector<double> shortest_times(const MissionGraph& g, int source, std::vector<int>* prev) {
  const auto n = static_cast<std::size_t>(g.vertex_count());
  std::vector<double> dist(n, kInf);
  if (prev) prev->assign(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(source)] = 0.0;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    for (int u : g.neighbors(v)) {
      double nd = d + g.find_edge(v, u)->time_s;
      if (nd < dist[static_cast<std::size_t>(u)]) {
        dist[static_cast<std::size_t>(u)] = nd;
        if (prev) (*prev)[static_cast<std::size_t>(u)] = v;
        pq.emplace(nd, u);
      }
    }
  }
  return dist;
}

}  // namespace

std::vector<double> time_to_destination(const MissionGraph& g) {
  return shortest_times(g, g.destination(), nullptr);
}

std::optional<Route> min_time_route(const MissionGraph& g) {
  // Search from the destination so prev[] walks forward from the start.
  std::vector<int> prev;
  auto dist = shortest_times(g, g.destination(), &prev);
  if (dist[static_cast<std::size_t>(g.start())] == kInf) return std::nullopt;
  Route r{g.start()};
  while (r.back() != g.destination()) r.push_back(prev[static_cast<std::size_t>(r.back())]);
  return r;
}

RouteDecoder::RouteDecoder(const MissionGraph& g, double time_budget_s)
    : graph_(&g), budget_(time_budget_s), lower_bound_(time_to_destination(g)) {}

std::optional<Route> RouteDecoder::decode(std::span<const double> priorities) const {
  const MissionGraph& g = *graph_;
  if (priorities.size() != static_cast<std::size_t>(g.vertex_count())) {
    throw InvalidInput("priority vector length must equal the vertex count");
  }
  const auto n = static_cast<std::size_t>(g.vertex_count());
  std::vector<char> on_path(n, 0), closed(n, 0);
  Route path{g.start()};
  on_path[static_cast<std::size_t>(g.start())] = 1;
  std::vector<double> elapsed{0.0};
  const bool budgeted = budget_ < kInf;
  if (budgeted && !(lower_bound_[static_cast<std::size_t>(g.start())] < budget_)) return std::nullopt;

  while (!path.empty()) {
    const int v = path.back();
    if (v == g.destination()) return path;
    int best = -1;
    double best_t = 0.0;
    for (int u : g.neighbors(v)) {
      const auto ui = static_cast<std::size_t>(u);
      if (on_path[ui] || closed[ui]) continue;
      const double t = g.find_edge(v, u)->time_s;
      if (budgeted && !(elapsed.back() + t + lower_bound_[ui] < budget_)) continue;
      if (best < 0 || priorities[ui] > priorities[static_cast<std::size_t>(best)]) {
        best = u;
        best_t = t;
      }
    }
    if (best >= 0) {
      path.push_back(best);
      on_path[static_cast<std::size_t>(best)] = 1;
      elapsed.push_back(elapsed.back() + best_t);
    } else {
      path.pop_back();
      elapsed.pop_back();
      on_path[static_cast<std::size_t>(v)] = 0;
      closed[static_cast<std::size_t>(v)] = 1;
    }
  }
  return std::nullopt;
}

std::optional<Route> decode_priority_vector(const MissionGraph& g, std::span<const double> priorities) {
  return RouteDecoder(g).decode(priorities);
}

std::vector<double> encode_route(const MissionGraph& g, std::span<const int> route) {
  std::vector<double> p(static_cast<std::size_t>(g.vertex_count()), -100.0);
  const double span = route.size() > 1 ? static_cast<double>(route.size() - 1) : 1.0;
  for (std::size_t i = 0; i < route.size(); ++i) {
    p[static_cast<std::size_t>(route[i])] = 100.0 - 100.0 * static_cast<double>(i) / span;
  }
  return p;
}

}  // namespace auv::graph
