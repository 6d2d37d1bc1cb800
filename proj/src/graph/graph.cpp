#include "auv/graph/graph.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace auv::graph {

std::vector<Task> sample_tasks(std::uint64_t seed, int count, double mean, double std) {
  if (count < 1) throw InvalidInput("task count must be >= 1");
  if (!(std >= 0.0)) throw InvalidInput("task weight std must be >= 0");
  if (std == 0.0 && !(mean > 0.0)) throw InvalidInput("degenerate task weight must be positive");
  if (mean + 8.0 * std <= 0.0) throw InvalidInput("task weight distribution is almost surely negative");
  Rng rng(seed);
  std::normal_distribution<double> dist(mean, std);
  std::vector<Task> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    double w = mean;
    if (std > 0.0) {
      do {
        w = dist(rng);
      } while (!(w > 0.0));
    }
    out.push_back({i, w});
  }
  return out;
}

MissionGraph::MissionGraph(std::vector<Vec3> waypoints, std::vector<Edge> edges, int start,
                           int destination, double speed_mps)
    : waypoints_(std::move(waypoints)),
      edges_(std::move(edges)),
      start_(start),
      destination_(destination),
      speed_(speed_mps) {
  const int k = vertex_count();
  if (k < 1) throw GraphError("graph needs at least one waypoint");
  if (!(speed_ > 0.0) || !std::isfinite(speed_)) throw GraphError("cruise speed must be positive");
  if (start_ < 0 || start_ >= k || destination_ < 0 || destination_ >= k) {
    throw GraphError("start/destination id out of range");
  }
  for (const auto& p : waypoints_) {
    if (!p.allFinite()) throw GraphError("waypoint coordinates must be finite");
  }
  adjacency_.assign(static_cast<std::size_t>(k), {});
  index_.assign(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), -1);
  std::vector<int> task_seen;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    auto& ed = edges_[e];
    if (ed.a < 0 || ed.a >= k || ed.b < 0 || ed.b >= k) throw GraphError("edge endpoint out of range");
    if (ed.a == ed.b) throw GraphError("self-loop edge");
    auto& slot = index_[static_cast<std::size_t>(ed.a * k + ed.b)];
    if (slot >= 0) throw GraphError("duplicate edge between a vertex pair");
    slot = static_cast<int>(e);
    index_[static_cast<std::size_t>(ed.b * k + ed.a)] = static_cast<int>(e);
    if (ed.task == kNoTask) {
      if (ed.weight != 1.0) throw GraphError("edge without a task must have weight 1");
    } else {
      if (ed.task < 0) throw GraphError("invalid task id");
      if (!(ed.weight > 1.0) || !std::isfinite(ed.weight)) {
        throw GraphError("task edge must have weight > 1");
      }
      task_seen.push_back(ed.task);
    }
    ed.distance_m = (waypoints_[static_cast<std::size_t>(ed.a)] -
                     waypoints_[static_cast<std::size_t>(ed.b)]).norm();
    ed.time_s = ed.distance_m / speed_;
    adjacency_[static_cast<std::size_t>(ed.a)].push_back(ed.b);
    adjacency_[static_cast<std::size_t>(ed.b)].push_back(ed.a);
  }
  std::sort(task_seen.begin(), task_seen.end());
  if (std::adjacent_find(task_seen.begin(), task_seen.end()) != task_seen.end()) {
    throw GraphError("task assigned to more than one edge");
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

int MissionGraph::edge_index(int a, int b) const {
  const int k = vertex_count();
  if (a < 0 || b < 0 || a >= k || b >= k) return -1;
  return index_[static_cast<std::size_t>(a * k + b)];
}

const Edge* MissionGraph::find_edge(int a, int b) const {
  int e = edge_index(a, b);
  return e < 0 ? nullptr : &edges_[static_cast<std::size_t>(e)];
}

bool MissionGraph::connected() const {
  std::vector<bool> seen(waypoints_.size(), false);
  std::vector<int> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : neighbors(v)) {
      if (!seen[static_cast<std::size_t>(u)]) {
        seen[static_cast<std::size_t>(u)] = true;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count == waypoints_.size();
}

int MissionGraph::task_edge_count() const {
  return static_cast<int>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.task != kNoTask; }));
}

MissionGraph MissionGraph::restricted(int new_start, std::span<const int> removed,
                                      std::span<const int> completed_tasks) const {
  std::vector<bool> gone(waypoints_.size(), false);
  for (int v : removed) {
    if (v < 0 || v >= vertex_count()) throw GraphError("removed vertex out of range");
    gone[static_cast<std::size_t>(v)] = true;
  }
  if (new_start < 0 || new_start >= vertex_count() || gone[static_cast<std::size_t>(new_start)]) {
    throw GraphError("restricted graph start is invalid");
  }
  std::vector<Edge> kept;
  for (const auto& e : edges_) {
    if (gone[static_cast<std::size_t>(e.a)] || gone[static_cast<std::size_t>(e.b)]) continue;
    Edge copy = e;
    if (copy.task != kNoTask &&
        std::find(completed_tasks.begin(), completed_tasks.end(), copy.task) != completed_tasks.end()) {
      copy.task = kNoTask;
      copy.weight = 1.0;
    }
    kept.push_back(copy);
  }
  return MissionGraph(waypoints_, std::move(kept), new_start, destination_, speed_);
}

// ---------------------------------------------------------------------------

namespace {

Vec3 place_waypoint(const env::TerrainGrid& grid, const GraphParams& params, std::size_t index,
                    Rng& rng) {
  std::uniform_real_distribution<double> ux(0.0, grid.width_m()), uy(0.0, grid.height_m()),
      uz(0.0, grid.depth_m());
  const bool templated = index < params.base_layout.size();
  std::normal_distribution<double> jitter(0.0, std::max(params.jitter_sigma_m, 1e-12));
  for (int attempt = 0; attempt < params.placement_attempts; ++attempt) {
    Vec3 p;
    // Templated waypoints fall back to uniform placement after half the
    // attempts, so a template point deep inside land cannot stall the build.
    if (templated && attempt < params.placement_attempts / 2) {
      const Vec2& base = params.base_layout[index];
      double jx = params.jitter_sigma_m > 0.0 ? jitter(rng) : 0.0;
      double jy = params.jitter_sigma_m > 0.0 ? jitter(rng) : 0.0;
      p = Vec3(base.x() + jx, base.y() + jy, uz(rng));
    } else {
      p = Vec3(ux(rng), uy(rng), uz(rng));
    }
    if (env::is_legal(grid, p)) return p;
  }
  throw GraphError("could not place a legal waypoint; terrain has too little water");
}

}  // namespace

MissionGraph build_graph(const env::TerrainGrid& grid, const GraphParams& params,
                         std::span<const Task> tasks, std::uint64_t seed) {
  const int k = params.node_count;
  if (k < 2) throw InvalidInput("node_count must be >= 2");
  if (!(params.edge_density >= 0.0 && params.edge_density <= 1.0)) {
    throw InvalidInput("edge_density must lie in [0, 1]");
  }
  if (!(params.speed_mps > 0.0)) throw InvalidInput("speed must be positive");
  if (params.neighbor_pool < 1) throw InvalidInput("neighbor_pool must be >= 1");

  const std::size_t pairs = static_cast<std::size_t>(k) * static_cast<std::size_t>(k - 1) / 2;
  const std::size_t budget = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(params.edge_density * static_cast<double>(pairs))),
      static_cast<std::size_t>(k - 1), pairs);
  if (tasks.size() > budget) {
    throw InvalidInput("more tasks than edges; raise edge_density or node_count");
  }
  for (const auto& t : tasks) {
    if (!(t.weight > 0.0)) throw InvalidInput("task weights must be positive");
  }

  Rng rng(seed);
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pts.push_back(place_waypoint(grid, params, static_cast<std::size_t>(i), rng));

  std::vector<char> adjacent(static_cast<std::size_t>(k * k), 0);
  std::vector<std::pair<int, int>> chosen;
  auto link = [&](int a, int b) {
    adjacent[static_cast<std::size_t>(a * k + b)] = adjacent[static_cast<std::size_t>(b * k + a)] = 1;
    chosen.emplace_back(std::min(a, b), std::max(a, b));
  };
  auto clear = [&](int a, int b) {
    return env::segment_is_clear(grid, pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)]);
  };

  // Random spanning tree with spatial locality.
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const int v = order[i];
    std::vector<int> placed(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i));
    std::stable_sort(placed.begin(), placed.end(), [&](int a, int b) {
      return (pts[static_cast<std::size_t>(a)] - pts[static_cast<std::size_t>(v)]).norm() <
             (pts[static_cast<std::size_t>(b)] - pts[static_cast<std::size_t>(v)]).norm();
    });
    const auto pool = std::min<std::size_t>(placed.size(), static_cast<std::size_t>(params.neighbor_pool));
    std::vector<int> clear_near;
    for (std::size_t j = 0; j < pool; ++j) {
      if (clear(v, placed[j])) clear_near.push_back(placed[j]);
    }
    int target = -1;
    if (!clear_near.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, clear_near.size() - 1);
      target = clear_near[pick(rng)];
    } else {
      for (std::size_t j = pool; j < placed.size() && target < 0; ++j) {
        if (clear(v, placed[j])) target = placed[j];
      }
      if (target < 0) target = placed.front();
    }
    link(v, target);
  }

  // Extra edges: uniform over the remaining pairs, line-of-sight pairs first.
  std::vector<std::pair<int, int>> open_pairs, blocked_pairs;
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      if (adjacent[static_cast<std::size_t>(a * k + b)]) continue;
      (clear(a, b) ? open_pairs : blocked_pairs).emplace_back(a, b);
    }
  }
  std::shuffle(open_pairs.begin(), open_pairs.end(), rng);
  std::shuffle(blocked_pairs.begin(), blocked_pairs.end(), rng);
  for (const auto* pool : {&open_pairs, &blocked_pairs}) {
    for (const auto& [a, b] : *pool) {
      if (chosen.size() >= budget) break;
      link(a, b);
    }
  }
  std::sort(chosen.begin(), chosen.end());

  std::vector<Edge> edges;
  edges.reserve(chosen.size());
  for (const auto& [a, b] : chosen) edges.push_back(Edge{a, b});
  std::vector<std::size_t> slots(edges.size());
  std::iota(slots.begin(), slots.end(), 0);
  std::shuffle(slots.begin(), slots.end(), rng);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto& e = edges[slots[t]];
    e.task = tasks[t].id;
    e.weight = 1.0 + tasks[t].weight;
  }
  return MissionGraph(std::move(pts), std::move(edges), 0, k - 1, params.speed_mps);
}

// ---------------------------------------------------------------------------

void write_graph(const MissionGraph& g, std::ostream& out) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "mission-graph 1\n";
  s << "speed " << g.speed() << "\n";
  s << "start " << g.start() << "\n";
  s << "destination " << g.destination() << "\n";
  s << "waypoints " << g.vertex_count() << "\n";
  for (int v = 0; v < g.vertex_count(); ++v) {
    const auto& p = g.waypoint(v);
    s << v << ' ' << p.x() << ' ' << p.y() << ' ' << p.z() << "\n";
  }
  s << "edges " << g.edge_count() << "\n";
  for (const auto& e : g.edges()) {
    s << e.a << ' ' << e.b << ' ' << e.task << ' ' << e.weight << ' ' << e.distance_m << ' '
      << e.time_s << "\n";
  }
  out << s.str();
}

namespace {

template <typename T>
T expect_field(std::istream& in, const char* key) {
  std::string word;
  T value{};
  if (!(in >> word) || word != key || !(in >> value)) {
    throw GraphError(std::string("graph file: expected '") + key + "'");
  }
  return value;
}

bool close_rel(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

MissionGraph read_graph(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "mission-graph") throw GraphError("not a mission graph file");
  if (version != 1) throw GraphError("unsupported mission graph version");
  auto speed = expect_field<double>(in, "speed");
  auto start = expect_field<int>(in, "start");
  auto dest = expect_field<int>(in, "destination");
  auto count = expect_field<long>(in, "waypoints");
  if (count < 1 || count > 100000) throw GraphError("graph file: bad waypoint count");
  std::vector<Vec3> pts(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    long id;
    double x, y, z;
    if (!(in >> id >> x >> y >> z) || id != i) throw GraphError("graph file: bad waypoint line");
    pts[static_cast<std::size_t>(i)] = Vec3(x, y, z);
  }
  auto ecount = expect_field<long>(in, "edges");
  if (ecount < 0 || ecount > count * (count - 1) / 2) throw GraphError("graph file: bad edge count");
  std::vector<Edge> edges(static_cast<std::size_t>(ecount));
  std::vector<std::pair<double, double>> stored(edges.size());
  for (auto i = 0UL; i < edges.size(); ++i) {
    auto& e = edges[i];
    if (!(in >> e.a >> e.b >> e.task >> e.weight >> stored[i].first >> stored[i].second)) {
      throw GraphError("graph file: bad edge line");
    }
  }
  MissionGraph g(std::move(pts), std::move(edges), start, dest, speed);
  for (std::size_t i = 0; i < stored.size(); ++i) {
    const auto& e = g.edge(static_cast<int>(i));
    if (!close_rel(stored[i].first, e.distance_m) || !close_rel(stored[i].second, e.time_s)) {
      throw GraphError("graph file: stored distance/time disagree with waypoints");
    }
  }
  return g;
}

}  // namespace auv::graph
