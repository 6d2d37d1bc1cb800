#include "auv/bench/scenario.h"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace auv::bench {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string index(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

// --- reading ---------------------------------------------------------------

void expect_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ScenarioError(path, "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || item.key() == a;
    if (!known) throw ScenarioError(join(path, item.key()), "unknown field");
  }
}

const json* member(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double read_number(const json& j, const std::string& path, const char* key, double fallback) {
  const json* v = member(j, key);
  if (!v) return fallback;
  if (!v->is_number()) throw ScenarioError(join(path, key), "expected a number");
  return v->get<double>();
}

int read_int(const json& j, const std::string& path, const char* key, int fallback) {
  const json* v = member(j, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ScenarioError(join(path, key), "expected an integer");
  if (v->is_number_unsigned() ? v->get<std::uint64_t>() > 1000000000ULL
                              : std::llabs(v->get<long long>()) > 1000000000LL) {
    throw ScenarioError(join(path, key), "integer out of range");
  }
  return v->get<int>();
}

std::string read_string(const json& j, const std::string& path, const char* key, const std::string& fallback) {
  const json* v = member(j, key);
  if (!v) return fallback;
  if (!v->is_string()) throw ScenarioError(join(path, key), "expected a string");
  return v->get<std::string>();
}

template <int N>
Eigen::Matrix<double, N, 1> read_vec(const json& j, const std::string& path, const char* key,
                                     const Eigen::Matrix<double, N, 1>& fallback) {
  const json* v = member(j, key);
  if (!v) return fallback;
  const std::string p = join(path, key);
  if (!v->is_array() || v->size() != N) throw ScenarioError(p, "expected an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) {
    const auto& e = (*v)[static_cast<std::size_t>(i)];
    if (!e.is_number()) throw ScenarioError(index(p, static_cast<std::size_t>(i)), "expected a number");
    out[i] = e.get<double>();
  }
  return out;
}

const json& read_array(const json& j, const std::string& path, const char* key) {
  static const json empty = json::array();
  const json* v = member(j, key);
  if (!v) return empty;
  if (!v->is_array()) throw ScenarioError(join(path, key), "expected an array");
  return *v;
}

Scenario from_json(const json& root) {
  expect_object(root, "",
                {"format_version", "seed", "terrain", "graph", "currents", "schedule", "obstacles", "limits",
                 "planners", "total_time_s", "time_threshold_s", "phi1", "phi2"});
  Scenario s;
  const json* version = member(root, "format_version");
  if (!version) throw ScenarioError("format_version", "missing");
  if (!version->is_number_integer() || *version != kFormatVersion) {
    throw ScenarioError("format_version", "unsupported version (expected 1)");
  }
  const json* seed = member(root, "seed");
  if (!seed) throw ScenarioError("seed", "missing");
  if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<long long>() >= 0)) {
    throw ScenarioError("seed", "expected a non-negative integer");
  }
  s.seed = seed->get<std::uint64_t>();

  if (const json* t = member(root, "terrain")) {
    expect_object(*t, "terrain",
                  {"raster", "clusters", "rows", "cols", "cell_size_m", "depth_m", "island_count",
                   "island_radius_mean_m", "island_radius_std_m", "uncertain_margin_m", "min_water_fraction"});
    auto& ts = s.terrain;
    auto& p = ts.synthetic;
    ts.raster = read_string(*t, "terrain", "raster", ts.raster);
    ts.clusters = read_int(*t, "terrain", "clusters", ts.clusters);
    const int rows = read_int(*t, "terrain", "rows", static_cast<int>(p.rows));
    const int cols = read_int(*t, "terrain", "cols", static_cast<int>(p.cols));
    if (rows < 2 || rows > 2000) throw ScenarioError("terrain.rows", "must be in [2, 2000]");
    if (cols < 2 || cols > 2000) throw ScenarioError("terrain.cols", "must be in [2, 2000]");
    p.rows = static_cast<std::size_t>(rows);
    p.cols = static_cast<std::size_t>(cols);
    p.cell_size_m = read_number(*t, "terrain", "cell_size_m", p.cell_size_m);
    p.depth_m = read_number(*t, "terrain", "depth_m", p.depth_m);
    p.island_count = read_int(*t, "terrain", "island_count", p.island_count);
    p.island_radius_mean_m = read_number(*t, "terrain", "island_radius_mean_m", p.island_radius_mean_m);
    p.island_radius_std_m = read_number(*t, "terrain", "island_radius_std_m", p.island_radius_std_m);
    p.uncertain_margin_m = read_number(*t, "terrain", "uncertain_margin_m", p.uncertain_margin_m);
    p.min_water_fraction = read_number(*t, "terrain", "min_water_fraction", p.min_water_fraction);
  }

  if (const json* g = member(root, "graph")) {
    expect_object(*g, "graph", {"node_count", "edge_density", "task_count", "task_mean", "task_std", "speed_mps"});
    auto& gs = s.graph;
    gs.node_count = read_int(*g, "graph", "node_count", gs.node_count);
    gs.edge_density = read_number(*g, "graph", "edge_density", gs.edge_density);
    gs.task_count = read_int(*g, "graph", "task_count", gs.task_count);
    gs.task_mean = read_number(*g, "graph", "task_mean", gs.task_mean);
    gs.task_std = read_number(*g, "graph", "task_std", gs.task_std);
    gs.speed_mps = read_number(*g, "graph", "speed_mps", gs.speed_mps);
  }

  if (member(root, "currents")) {
    const json& cs = read_array(root, "", "currents");
    s.currents.clear();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string p = index("currents", i);
      expect_object(cs[i], p, {"vortices"});
      const json& vs = read_array(cs[i], p, "vortices");
      std::vector<env::Vortex> snap;
      for (std::size_t k = 0; k < vs.size(); ++k) {
        const std::string vp = index(join(p, "vortices"), k);
        expect_object(vs[k], vp, {"center", "radius_m", "strength"});
        env::Vortex v;
        v.center = read_vec<2>(vs[k], vp, "center", v.center);
        v.radius_m = read_number(vs[k], vp, "radius_m", v.radius_m);
        v.strength = read_number(vs[k], vp, "strength", v.strength);
        snap.push_back(v);
      }
      s.currents.push_back(std::move(snap));
    }
  }

  const json& sched = read_array(root, "", "schedule");
  for (std::size_t i = 0; i < sched.size(); ++i) {
    const std::string p = index("schedule", i);
    expect_object(sched[i], p, {"time_s", "snapshot"});
    exec::SnapshotSwitch sw;
    sw.time_s = read_number(sched[i], p, "time_s", sw.time_s);
    sw.snapshot = read_int(sched[i], p, "snapshot", sw.snapshot);
    s.schedule.push_back(sw);
  }

  const json& obs = read_array(root, "", "obstacles");
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string p = index("obstacles", i);
    expect_object(obs[i], p, {"position", "radius_m", "velocity", "uncertainty_rate", "kind"});
    env::Obstacle o;
    o.position = read_vec<3>(obs[i], p, "position", o.position);
    o.radius_m = read_number(obs[i], p, "radius_m", o.radius_m);
    o.velocity = read_vec<3>(obs[i], p, "velocity", o.velocity);
    o.uncertainty_rate = read_number(obs[i], p, "uncertainty_rate", o.uncertainty_rate);
    const std::string kind = read_string(obs[i], p, "kind", "static");
    if (kind == "static") {
      o.kind = env::ObstacleKind::Static;
    } else if (kind == "moving") {
      o.kind = env::ObstacleKind::Moving;
    } else {
      throw ScenarioError(join(p, "kind"), "expected \"static\" or \"moving\"");
    }
    s.obstacles.push_back(o);
  }

  if (const json* l = member(root, "limits")) {
    expect_object(*l, "limits", {"cruise_mps", "surge_max_mps", "sway_max_mps", "yaw_rate_max", "z_min_m", "z_max_m"});
    auto& v = s.limits;
    v.cruise_mps = read_number(*l, "limits", "cruise_mps", v.cruise_mps);
    v.surge_max_mps = read_number(*l, "limits", "surge_max_mps", v.surge_max_mps);
    v.sway_max_mps = read_number(*l, "limits", "sway_max_mps", v.sway_max_mps);
    v.yaw_rate_max = read_number(*l, "limits", "yaw_rate_max", v.yaw_rate_max);
    v.z_min_m = read_number(*l, "limits", "z_min_m", v.z_min_m);
    v.z_max_m = read_number(*l, "limits", "z_max_m", v.z_max_m);
  }

  if (const json* p = member(root, "planners")) {
    expect_object(*p, "planners",
                  {"tamp_population", "tamp_iterations", "opp_population", "opp_iterations", "interior_points",
                   "replan_tolerance", "budget_reserve"});
    auto& ps = s.planners;
    ps.tamp_population = read_int(*p, "planners", "tamp_population", ps.tamp_population);
    ps.tamp_iterations = read_int(*p, "planners", "tamp_iterations", ps.tamp_iterations);
    ps.opp_population = read_int(*p, "planners", "opp_population", ps.opp_population);
    ps.opp_iterations = read_int(*p, "planners", "opp_iterations", ps.opp_iterations);
    ps.interior_points = read_int(*p, "planners", "interior_points", ps.interior_points);
    ps.replan_tolerance = read_number(*p, "planners", "replan_tolerance", ps.replan_tolerance);
    ps.budget_reserve = read_number(*p, "planners", "budget_reserve", ps.budget_reserve);
  }

  s.total_time_s = read_number(root, "", "total_time_s", s.total_time_s);
  s.time_threshold_s = read_number(root, "", "time_threshold_s", s.time_threshold_s);
  s.phi1 = read_number(root, "", "phi1", s.phi1);
  s.phi2 = read_number(root, "", "phi2", s.phi2);
  return s;
}

// --- writing ---------------------------------------------------------------

json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }
json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const Scenario& s) {
  json j;
  j["format_version"] = s.format_version;
  j["seed"] = s.seed;
  const auto& p = s.terrain.synthetic;
  j["terrain"] = {{"raster", s.terrain.raster},
                  {"clusters", s.terrain.clusters},
                  {"rows", p.rows},
                  {"cols", p.cols},
                  {"cell_size_m", p.cell_size_m},
                  {"depth_m", p.depth_m},
                  {"island_count", p.island_count},
                  {"island_radius_mean_m", p.island_radius_mean_m},
                  {"island_radius_std_m", p.island_radius_std_m},
                  {"uncertain_margin_m", p.uncertain_margin_m},
                  {"min_water_fraction", p.min_water_fraction}};
  const auto& g = s.graph;
  j["graph"] = {{"node_count", g.node_count}, {"edge_density", g.edge_density}, {"task_count", g.task_count},
                {"task_mean", g.task_mean},   {"task_std", g.task_std},         {"speed_mps", g.speed_mps}};
  json cs = json::array();
  for (const auto& snap : s.currents) {
    json vs = json::array();
    for (const auto& v : snap) {
      vs.push_back({{"center", vec_json(v.center)}, {"radius_m", v.radius_m}, {"strength", v.strength}});
    }
    cs.push_back({{"vortices", vs}});
  }
  j["currents"] = cs;
  json sched = json::array();
  for (const auto& sw : s.schedule) sched.push_back({{"time_s", sw.time_s}, {"snapshot", sw.snapshot}});
  j["schedule"] = sched;
  json obs = json::array();
  for (const auto& o : s.obstacles) {
    obs.push_back({{"position", vec_json(o.position)},
                   {"radius_m", o.radius_m},
                   {"velocity", vec_json(o.velocity)},
                   {"uncertainty_rate", o.uncertainty_rate},
                   {"kind", o.kind == env::ObstacleKind::Static ? "static" : "moving"}});
  }
  j["obstacles"] = obs;
  const auto& l = s.limits;
  j["limits"] = {{"cruise_mps", l.cruise_mps},     {"surge_max_mps", l.surge_max_mps}, {"sway_max_mps", l.sway_max_mps},
                 {"yaw_rate_max", l.yaw_rate_max}, {"z_min_m", l.z_min_m},             {"z_max_m", l.z_max_m}};
  const auto& pl = s.planners;
  j["planners"] = {{"tamp_population", pl.tamp_population}, {"tamp_iterations", pl.tamp_iterations},
                   {"opp_population", pl.opp_population},   {"opp_iterations", pl.opp_iterations},
                   {"interior_points", pl.interior_points}, {"replan_tolerance", pl.replan_tolerance},
                   {"budget_reserve", pl.budget_reserve}};
  j["total_time_s"] = s.total_time_s;
  j["time_threshold_s"] = s.time_threshold_s;
  j["phi1"] = s.phi1;
  j["phi2"] = s.phi2;
  return j;
}

void require(bool ok, const std::string& field, const char* message) {
  if (!ok) throw ScenarioError(field, message);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void validate(const Scenario& s) {
  require(s.format_version == kFormatVersion, "format_version", "unsupported version (expected 1)");

  const auto& t = s.terrain;
  require(t.clusters >= 2 && t.clusters <= 16, "terrain.clusters", "must be in [2, 16]");
  const auto& p = t.synthetic;
  require(p.rows >= 2 && p.rows <= 2000, "terrain.rows", "must be in [2, 2000]");
  require(p.cols >= 2 && p.cols <= 2000, "terrain.cols", "must be in [2, 2000]");
  require(finite_positive(p.cell_size_m), "terrain.cell_size_m", "must be positive");
  require(finite_positive(p.depth_m), "terrain.depth_m", "must be positive");
  require(p.island_count >= 0 && p.island_count <= 1000, "terrain.island_count", "must be in [0, 1000]");
  require(std::isfinite(p.island_radius_mean_m) && p.island_radius_mean_m >= 0.0, "terrain.island_radius_mean_m",
          "must be non-negative");
  require(std::isfinite(p.island_radius_std_m) && p.island_radius_std_m >= 0.0, "terrain.island_radius_std_m",
          "must be non-negative");
  require(std::isfinite(p.uncertain_margin_m) && p.uncertain_margin_m >= 0.0, "terrain.uncertain_margin_m",
          "must be non-negative");
  require(p.min_water_fraction >= 0.0 && p.min_water_fraction <= 1.0, "terrain.min_water_fraction",
          "must be in [0, 1]");

  const auto& g = s.graph;
  require(g.node_count >= 2 && g.node_count <= kMaxNodes, "graph.node_count", "must be in [2, 50]");
  require(g.edge_density > 0.0 && g.edge_density <= 1.0, "graph.edge_density", "must be in (0, 1]");
  require(g.task_count >= 0, "graph.task_count", "must be non-negative");
  const double k = g.node_count;
  const double budget = std::max(k - 1.0, std::round(g.edge_density * k * (k - 1.0) / 2.0));
  require(g.task_count <= budget, "graph.task_count", "exceeds the number of edges the graph will have");
  require(std::isfinite(g.task_mean), "graph.task_mean", "must be finite");
  require(std::isfinite(g.task_std) && g.task_std >= 0.0, "graph.task_std", "must be non-negative");
  require(g.task_count == 0 || g.task_mean > 0.0 || g.task_std > 0.0, "graph.task_mean",
          "positive weights cannot be drawn");
  require(finite_positive(g.speed_mps), "graph.speed_mps", "must be positive");

  require(!s.currents.empty(), "currents", "at least one snapshot is required");
  require(s.currents.size() <= 64, "currents", "at most 64 snapshots");
  for (std::size_t i = 0; i < s.currents.size(); ++i) {
    for (std::size_t k2 = 0; k2 < s.currents[i].size(); ++k2) {
      const auto& v = s.currents[i][k2];
      const std::string path = index(index("currents", i) + ".vortices", k2);
      require(v.center.allFinite(), path + ".center", "must be finite");
      require(finite_positive(v.radius_m), path + ".radius_m", "must be positive");
      require(std::isfinite(v.strength), path + ".strength", "must be finite");
    }
  }
  double last = 0.0;
  for (std::size_t i = 0; i < s.schedule.size(); ++i) {
    const auto& sw = s.schedule[i];
    const std::string path = index("schedule", i);
    require(std::isfinite(sw.time_s) && sw.time_s >= last, path + ".time_s", "must be finite, >= 0 and sorted");
    require(sw.snapshot >= 0 && sw.snapshot < static_cast<int>(s.currents.size()), path + ".snapshot",
            "refers to a missing snapshot");
    last = sw.time_s;
  }
  for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
    try {
      s.obstacles[i].validate();
    } catch (const InvalidInput& e) {
      throw ScenarioError(index("obstacles", i), e.what());
    }
  }
  try {
    s.limits.validate();
  } catch (const InvalidInput& e) {
    throw ScenarioError("limits", e.what());
  }
  require(std::isfinite(s.limits.cruise_mps) && std::isfinite(s.limits.z_max_m) && std::isfinite(s.limits.z_min_m),
          "limits", "must be finite");

  const auto& pl = s.planners;
  require(pl.tamp_population >= 2 && pl.tamp_population <= 10000, "planners.tamp_population", "must be in [2, 10000]");
  require(pl.tamp_iterations >= 1 && pl.tamp_iterations <= 100000, "planners.tamp_iterations",
          "must be in [1, 100000]");
  require(pl.opp_population >= 4 && pl.opp_population <= 10000, "planners.opp_population", "must be in [4, 10000]");
  require(pl.opp_iterations >= 1 && pl.opp_iterations <= 100000, "planners.opp_iterations", "must be in [1, 100000]");
  require(pl.interior_points >= 1 && pl.interior_points <= 50, "planners.interior_points", "must be in [1, 50]");
  require(std::isfinite(pl.replan_tolerance) && pl.replan_tolerance >= 0.0, "planners.replan_tolerance",
          "must be non-negative");
  require(pl.budget_reserve >= 0.0 && pl.budget_reserve < 1.0, "planners.budget_reserve", "must be in [0, 1)");

  require(finite_positive(s.total_time_s), "total_time_s", "must be positive");
  require(finite_positive(s.time_threshold_s), "time_threshold_s", "must be positive");
  require(std::isfinite(s.phi1) && s.phi1 >= 0.0, "phi1", "must be non-negative");
  require(std::isfinite(s.phi2) && s.phi2 >= 0.0, "phi2", "must be non-negative");
}

std::string serialize(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ScenarioError("", std::string("malformed scenario: ") + e.what());
  }
  Scenario s;
  try {
    s = from_json(j);
  } catch (const json::exception& e) {
    throw ScenarioError("", std::string("malformed scenario: ") + e.what());
  }
  validate(s);
  return s;
}

env::TerrainGrid build_terrain(const Scenario& s) {
  if (s.terrain.raster.empty()) {
    return env::generate_synthetic_terrain(derive_seed(s.seed, {1}), s.terrain.synthetic);
  }
  std::ifstream in(s.terrain.raster, std::ios::binary);
  if (!in) throw ScenarioError("terrain.raster", "cannot open " + s.terrain.raster);
  env::ClusterOptions opts;
  opts.k = s.terrain.clusters;
  opts.seed = derive_seed(s.seed, {1});
  opts.cell_size_m = s.terrain.synthetic.cell_size_m;
  opts.depth_m = s.terrain.synthetic.depth_m;
  return env::cluster_map(env::read_ppm(in), opts);
}

Scenario generate_scenario(std::uint64_t seed, const GenerateParams& params) {
  if (params.current_snapshots < 1) throw ScenarioError("current_snapshots", "must be >= 1");
  if (params.obstacles < 0) throw ScenarioError("obstacles", "must be >= 0");
  Scenario s;
  s.seed = seed;
  s.graph = params.graph;
  s.terrain.synthetic = params.terrain;
  s.total_time_s = params.total_time_s;
  s.time_threshold_s = params.time_threshold_s;
  validate(s);

  const env::TerrainGrid grid = build_terrain(s);
  s.currents.clear();
  for (int k = 0; k < params.current_snapshots; ++k) {
    auto field = env::random_current_field(derive_seed(seed, {10, static_cast<std::uint64_t>(k)}), grid.width_m(),
                                           grid.height_m(), params.vortices);
    s.currents.push_back(field.vortices());
    if (k > 0) s.schedule.push_back({params.switch_time_s * k, k});
  }

  Rng rng(derive_seed(seed, {11}));
  std::uniform_real_distribution<double> ux(0.0, grid.width_m()), uy(0.0, grid.height_m()), uz(0.0, grid.depth_m()),
      ur(100.0, 300.0), uv(-0.5, 0.5);
  for (int i = 0; i < params.obstacles; ++i) {
    env::Obstacle o;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      o.position = Vec3(ux(rng), uy(rng), uz(rng));
      if (env::is_legal(grid, o.position)) break;
    }
    o.radius_m = ur(rng);
    if (i % 2 == 1) {
      o.kind = env::ObstacleKind::Moving;
      o.velocity = Vec3(uv(rng), uv(rng), 0.0);
      o.uncertainty_rate = 0.01;
    }
    s.obstacles.push_back(o);
  }
  validate(s);
  return s;
}

exec::Mission build_mission(const Scenario& s, std::shared_ptr<const env::TerrainGrid> terrain,
                            const std::optional<Topology>& topology) {
  validate(s);
  Topology topo;
  if (topology) {
    topo = *topology;
  } else {
    topo.node_count = s.graph.node_count;
    topo.seed = s.seed;
  }
  const auto tasks = graph::sample_tasks(derive_seed(topo.seed, {2}), s.graph.task_count, s.graph.task_mean,
                                         s.graph.task_std);
  graph::GraphParams gp;
  gp.node_count = topo.node_count;
  gp.edge_density = s.graph.edge_density;
  gp.speed_mps = s.graph.speed_mps;
  gp.base_layout = topo.layout;
  gp.jitter_sigma_m = topo.jitter_sigma_m;
  auto g = graph::build_graph(*terrain, gp, tasks, derive_seed(topo.seed, {3}));

  std::vector<std::shared_ptr<const env::CurrentField>> currents;
  for (const auto& snap : s.currents) currents.push_back(std::make_shared<env::CurrentField>(snap));
  exec::Mission m{std::move(g), std::move(terrain), std::move(currents), s.schedule,
                  std::make_shared<std::vector<env::Obstacle>>(s.obstacles)};
  m.total_time_s = s.total_time_s;
  m.time_threshold_s = s.time_threshold_s;
  return m;
}

exec::Mission build_mission(const Scenario& s) {
  return build_mission(s, std::make_shared<env::TerrainGrid>(build_terrain(s)));
}

exec::ExecConfig exec_config(const Scenario& s, tamp::Algorithm tamp_alg, opp::Algorithm opp_alg,
                             std::uint64_t seed) {
  exec::ExecConfig cfg;
  cfg.tamp.algorithm = tamp_alg;
  cfg.tamp.population = s.planners.tamp_population;
  cfg.tamp.iterations = s.planners.tamp_iterations;
  cfg.tamp.time_threshold_s = s.time_threshold_s;
  cfg.opp.algorithm = opp_alg;
  cfg.opp.population = s.planners.opp_population;
  cfg.opp.iterations = s.planners.opp_iterations;
  cfg.opp.interior_points = s.planners.interior_points;
  cfg.opp.limits = s.limits;
  cfg.phi1 = s.phi1;
  cfg.phi2 = s.phi2;
  cfg.replan_tolerance = s.planners.replan_tolerance;
  cfg.budget_reserve = s.planners.budget_reserve;
  cfg.seed = seed;
  return cfg;
}

}  // namespace auv::bench
