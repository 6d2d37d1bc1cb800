#include <doctest.h>

#include <functional>
#include <sstream>

#include "auv/opp/operators.h"
#include "auv/opp/path.h"
#include "auv/opp/solver.h"
#include "oracles.h"

using namespace auv;
using namespace auv::opp;

namespace {

VecX vec(std::initializer_list<double> v) {
  VecX x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

// Cox-de Boor basis recursion, evaluated independently of the library.
double basis(int i, int p, double u, const std::vector<double>& t) {
  if (p == 0) {
    bool last = u == t.back() && t[i] < t[i + 1] && t[i + 1] == t.back();
    return (t[i] <= u && u < t[i + 1]) || last ? 1.0 : 0.0;
  }
  double a = t[i + p] > t[i] ? (u - t[i]) / (t[i + p] - t[i]) * basis(i, p - 1, u, t) : 0.0;
  double b = t[i + p + 1] > t[i + 1] ? (t[i + p + 1] - u) / (t[i + p + 1] - t[i + 1]) * basis(i + 1, p - 1, u, t) : 0.0;
  return a + b;
}

Vec3 reference_spline(const std::vector<Vec3>& c, double u) {
  int n = int(c.size()), p = std::min(3, n - 1);
  std::vector<double> t;
  for (int i = 0; i <= p; ++i) t.push_back(0.0);
  for (int i = 1; i < n - p; ++i) t.push_back(double(i) / (n - p));
  for (int i = 0; i <= p; ++i) t.push_back(1.0);
  Vec3 s = Vec3::Zero();
  for (int i = 0; i < n; ++i) s += basis(i, p, u, t) * c[i];
  return s;
}

Environment open_env(std::vector<env::Obstacle> obs = {}, env::CurrentField field = {}) {
  Environment e;
  e.terrain = std::make_shared<env::TerrainGrid>(oracle::open_water(100, 100.0));
  e.current = std::make_shared<env::CurrentField>(std::move(field));
  e.obstacles = std::make_shared<std::vector<env::Obstacle>>(std::move(obs));
  return e;
}

}  // namespace

TEST_CASE("B-spline evaluation matches the basis-function definition") {
  Rng rng(1);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int n = 2; n <= 9; ++n) {
    std::vector<Vec3> c;
    for (int i = 0; i < n; ++i) c.emplace_back(u(rng), u(rng), u(rng));
    auto pts = bspline_points(c, 41);
    for (int s = 0; s < 41; ++s) {
      Vec3 ref = reference_spline(c, s / 40.0);
      CHECK((pts[s] - ref).norm() < 1e-9);
    }
    CHECK((pts.front() - c.front()).norm() < 1e-12);
    CHECK((pts.back() - c.back()).norm() < 1e-12);
  }
}

TEST_CASE("B-spline convex hull property on random polygons") {
  Rng rng(2);
  std::uniform_real_distribution<double> u(-100, 100);
  std::normal_distribution<double> n01(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec3> c;
    for (int i = 0; i < 7; ++i) c.emplace_back(u(rng), u(rng), u(rng));
    auto pts = bspline_points(c, 200);
    // Support-function test: a point in the hull never exceeds the hull's
    // extent along any direction.
    for (int d = 0; d < 100; ++d) {
      Vec3 dir(n01(rng), n01(rng), n01(rng));
      double hull = -1e300;
      for (const auto& p : c) hull = std::max(hull, dir.dot(p));
      for (const auto& p : pts) REQUIRE(dir.dot(p) <= hull + 1e-9);
    }
  }
}

TEST_CASE("spline_path geometry and timing") {
  VehicleLimits lim;
  env::CurrentField still;
  SUBCASE("collinear polygon is the straight segment") {
    std::vector<Vec3> c{Vec3(0, 0, 10), Vec3(100, 0, 10), Vec3(300, 0, 10), Vec3(500, 0, 10), Vec3(1000, 0, 10)};
    auto p = spline_path(c, 400, lim, still);
    CHECK(p.arc_length_m == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(p.time_s == doctest::Approx(1000.0 / lim.cruise_mps).epsilon(1e-12));
    CHECK((p.samples.front().position - c.front()).norm() < 1e-6);
    CHECK((p.samples.back().position - c.back()).norm() < 1e-6);
    for (const auto& s : p.samples) {
      CHECK(s.yaw_rate == 0.0);
      CHECK(s.u == doctest::Approx(lim.cruise_mps));
      CHECK(s.v == doctest::Approx(0.0));
    }
  }
  SUBCASE("square polygon arc length lies between chord and polygon length") {
    std::vector<Vec3> c{Vec3(0, 0, 0), Vec3(0, 100, 0), Vec3(100, 100, 0), Vec3(100, 0, 0)};
    auto p = spline_path(c, 10000, lim, still);
    CHECK(p.arc_length_m > 100.0);
    CHECK(p.arc_length_m < 300.0);
  }
  SUBCASE("coincident endpoints are rejected") {
    std::vector<Vec3> c{Vec3(0, 0, 0), Vec3(5, 5, 0), Vec3(0, 0, 0)};
    CHECK_THROWS_AS(spline_path(c, 100, lim, still), InvalidInput);
  }
  SUBCASE("current-aware time against numeric quadrature") {
    env::CurrentField field({env::Vortex{Vec2(500, 300), 400.0, 1500.0}});
    std::vector<Vec3> c{Vec3(0, 0, 10), Vec3(500, 0, 10), Vec3(1000, 0, 10)};
    auto aware = spline_path(c, 2000, lim, field, TimeMode::CurrentAware);
    auto plain = spline_path(c, 2000, lim, field, TimeMode::StillWater);
    double t = 0.0;
    const int steps = 200000;
    for (int i = 0; i < steps; ++i) {
      double x = (i + 0.5) * 1000.0 / steps;
      t += (1000.0 / steps) / std::max(0.1, lim.cruise_mps + field.at(Vec2(x, 0)).x());
    }
    CHECK(aware.time_s == doctest::Approx(t).epsilon(1e-6));
    CHECK(plain.time_s == doctest::Approx(500.0).epsilon(1e-12));
    CHECK(aware.time_s < plain.time_s);  // counter-clockwise vortex north of the line pushes +x
    // Sway equals the cross-track current.
    const auto& mid = aware.samples[1000];
    CHECK(mid.v == doctest::Approx(field.at(Vec2(mid.position.x(), 0)).y()).epsilon(1e-3));
  }
}

TEST_CASE("path violations and cost") {
  VehicleLimits lim;
  auto grid = oracle::open_water(100, 100.0);
  std::vector<Vec3> c{Vec3(1000, 1000, 50), Vec3(2000, 1000, 50)};
  auto p = spline_path(c, 200, lim, env::CurrentField{});

  auto v = path_violations(p, grid, {}, lim, 0.0);
  CHECK_FALSE(v.any());
  CHECK(path_cost(p, v, {}, 1.0, 250.0) == doctest::Approx(p.time_s / 250.0));

  std::vector<env::Obstacle> obs{env::Obstacle{Vec3(1500, 1000, 50), 20.0}};
  auto hit = path_violations(p, grid, obs, lim, 0.0);
  CHECK(hit.collision == 1.0);
  CHECK(hit.collision_extent > 0.0);
  CHECK(path_cost(p, hit, {}, 1.0, 250.0) > path_cost(p, v, {}, 1.0, 250.0));

  // A moving obstacle reaches the path only later in the mission.
  std::vector<env::Obstacle> late{env::Obstacle{Vec3(1500, 1600, 50), 20.0, Vec3(0, -1, 0), 0.0, env::ObstacleKind::Moving}};
  CHECK(path_violations(p, grid, late, lim, 0.0).collision == 0.0);
  CHECK(path_violations(p, grid, late, lim, 600.0 - 250.0).collision == 1.0);

  // Coast cell on the path.
  std::vector<env::CellClass> cells(100 * 100, env::CellClass::Water);
  cells[10 * 100 + 15] = env::CellClass::Coast;
  env::TerrainGrid island(100, 100, 100.0, 100.0, cells);
  CHECK(path_violations(p, island, {}, lim, 0.0).collision == 1.0);

  // Single sample 5 m below Z_max.
  PathCandidate manual;
  for (int i = 0; i < 3; ++i) {
    PathSample s;
    s.position = Vec3(1000 + i, 1000, i == 1 ? lim.z_max_m + 5.0 : 50.0);
    manual.samples.push_back(s);
  }
  auto dv = path_violations(manual, grid, {}, lim, 0.0);
  CHECK(dv.z_max == doctest::Approx(5.0));
  ViolationWeights w;
  w.z_max = 2.0;
  CHECK(dv.weighted(w).z_max == doctest::Approx(10.0));

  PathCandidate timed;
  timed.time_s = 100.0;
  Violations ten;
  ten.z_max = 10.0;
  CHECK(path_cost(timed, ten, w, 1.0, 100.0) == doctest::Approx(21.0));
}

TEST_CASE("violation hinges are monotone in the limits") {
  Rng rng(5);
  std::uniform_real_distribution<double> u(0, 1000), uz(-20, 120);
  env::CurrentField field({env::Vortex{Vec2(500, 500), 200.0, 3000.0}});
  auto grid = oracle::open_water(20, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec3> c;
    for (int i = 0; i < 6; ++i) c.emplace_back(u(rng), u(rng), uz(rng));
    VehicleLimits lim;
    lim.surge_max_mps = 1.9;
    lim.sway_max_mps = 0.1;
    lim.yaw_rate_max = 0.01;
    lim.z_min_m = 10;
    lim.z_max_m = 90;
    auto p = spline_path(c, 300, lim, field);
    auto base = path_violations(p, grid, {}, lim, 0.0);
    VehicleLimits looser = lim;
    looser.surge_max_mps += 0.3;
    looser.sway_max_mps += 0.1;
    looser.yaw_rate_max += 0.01;
    looser.z_max_m += 5;
    looser.z_min_m -= 5;
    auto after = path_violations(p, grid, {}, looser, 0.0);
    CHECK(after.surge <= base.surge);
    CHECK(after.sway <= base.sway);
    CHECK(after.yaw_rate <= base.yaw_rate);
    CHECK(after.z_max <= base.z_max);
    CHECK(after.z_min <= base.z_min);
  }
}

TEST_CASE("DE operators") {
  CHECK(de_mutate(vec({3, 0}), vec({1, 0}), vec({1, 1}), 0.5) == vec({2, 1}));
  CHECK(de_mutate(vec({3, 0}), vec({1, 0}), vec({1, 1}), 0.0) == vec({1, 1}));
  CHECK(de_mutate(vec({4, 4}), vec({4, 4}), vec({1, 1}), 0.9) == vec({1, 1}));
  std::vector<VecX> three{vec({1}), vec({2}), vec({3})};
  Rng rng(1);
  CHECK_THROWS_AS(de_mutate(three, 0, DeParams{}, rng), InvalidInput);

  CHECK(de_crossover(vec({0, 0, 0}), vec({9, 9, 9}), {false, true, false}) == vec({0, 9, 0}));
  for (int i = 0; i < 100; ++i) {
    CHECK(de_crossover(vec({0, 0, 0}), vec({9, 9, 9}), 1.0, rng) == vec({9, 9, 9}));
    VecX t = de_crossover(vec({0, 0, 0, 0}), vec({9, 9, 9, 9}), 0.0, rng);
    CHECK((t.array() == 9).count() == 1);
  }

  VecX parent = vec({0}), trial = vec({1});
  CHECK(de_select(parent, trial, 5.0, 4.0) == trial);
  CHECK(de_select(parent, trial, 5.0, 5.0) == parent);
  CHECK(de_select(parent, trial, 20.0, 21.0) == parent);

  // Members picked for the mutant are distinct and differ from i.
  std::vector<VecX> pop{vec({0}), vec({1}), vec({10}), vec({100}), vec({1000})};
  DeParams p;
  p.scale = 0.0;
  for (int i = 0; i < 200; ++i) CHECK(de_mutate(pop, 0, p, rng)[0] != 0.0);
}

TEST_CASE("FA move") {
  VecX zero = VecX::Zero(2);
  CHECK(fa_move(vec({0, 0}), vec({2, 3}), 1.0, 1.0, 0.0, 0.0, zero) == vec({2, 3}));
  CHECK(fa_move(vec({1, 1}), vec({2, 3}), 1.0, INFINITY, 1.0, 0.0, zero) == vec({1, 1}));
  VecX m = fa_move(vec({0, 0}), vec({2, 0}), 1.0, 1.0, 1.0, 0.0, zero);
  CHECK(m[0] == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(m[1] == 0.0);
  CHECK(fa_move(vec({0}), vec({0}), 1.0, 1.0, 0.0, 0.5, vec({2})) == vec({1}));
  FaParams fp;
  fp.alpha0 = 0.4;
  fp.damping = 0.5;
  CHECK(fa_alpha(fp, 2) == doctest::Approx(0.1));
}

TEST_CASE("solve_opp on open water and around an obstacle") {
  const Vec3 s(1000, 5000, 50), g(4000, 5000, 50);
  for (auto alg : {Algorithm::DE, Algorithm::FA, Algorithm::BBO, Algorithm::PSO}) {
    OppConfig cfg;
    cfg.algorithm = alg;
    cfg.seed = 3;
    auto free = solve_opp(s, g, open_env(), cfg);
    CHECK_FALSE(free.violated);
    CHECK(free.path.arc_length_m <= 3000.0 * 1.01);
    CHECK((free.path.samples.front().position - s).norm() < 1e-6);
    CHECK((free.path.samples.back().position - g).norm() < 1e-6);

    auto env = open_env({env::Obstacle{Vec3(2500, 5000, 50), 300.0}});
    auto det = solve_opp(s, g, env, cfg);
    CHECK_MESSAGE(det.path.violations.collision == 0.0, to_string(alg));
    CHECK(det.path.arc_length_m > 3000.0);
    for (std::size_t i = 1; i < det.log.size(); ++i) {
      CHECK(det.log[i].best_cost <= det.log[i - 1].best_cost);
    }
    auto again = solve_opp(s, g, env, cfg);
    CHECK(again.genome == det.genome);
    CHECK(again.path.cost == det.path.cost);
  }
}

TEST_CASE("warm start does not lose to a cold start") {
  const Vec3 s(1000, 5000, 50), g(4000, 5200, 60);
  auto env = open_env({env::Obstacle{Vec3(2500, 5100, 50), 300.0}, env::Obstacle{Vec3(3300, 4900, 50), 200.0}});
  for (auto alg : {Algorithm::DE, Algorithm::FA, Algorithm::BBO, Algorithm::PSO}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      OppConfig cfg;
      cfg.algorithm = alg;
      cfg.seed = seed;
      auto cold = solve_opp(s, g, env, cfg);
      auto warm = solve_opp(s, g, env, cfg, cold.genome);
      CHECK(warm.path.cost <= cold.path.cost);
      cfg.seed = seed + 1000;
      auto other = solve_opp(s, g, env, cfg, cold.genome);
      CHECK(other.path.cost <= cold.path.cost);
    }
  }
  // A genome of the wrong size is ignored.
  OppConfig cfg;
  auto plain = solve_opp(s, g, env, cfg);
  auto ignored = solve_opp(s, g, env, cfg, VecX::Zero(4));
  CHECK(plain.genome == ignored.genome);
}

TEST_CASE("converged paths respect kinodynamic bounds") {
  env::VortexFieldParams mild;
  mild.peak_speed_max = 0.25;
  env::CurrentField field = env::random_current_field(7, 10000, 10000, mild);
  auto env = open_env({env::Obstacle{Vec3(5000, 5000, 50), 250.0}}, field);
  OppConfig cfg;
  cfg.iterations = 60;
  auto r = solve_opp(Vec3(3500, 4800, 20), Vec3(6500, 5300, 70), env, cfg);
  REQUIRE_FALSE(r.violated);
  CHECK(r.path.violations.weighted_total(cfg.weights) == 0.0);
  for (const auto& smp : r.path.samples) {
    CHECK(std::abs(smp.u) <= cfg.limits.surge_max_mps);
    CHECK(std::abs(smp.v) <= cfg.limits.sway_max_mps);
    CHECK(std::abs(smp.yaw_rate) <= cfg.limits.yaw_rate_max);
  }
}

TEST_CASE("corridor and CSV output") {
  OppConfig cfg;
  auto grid = oracle::open_water(10, 100.0);
  auto c = make_corridor(Vec3(100, 100, 10), Vec3(500, 100, 10), 2, cfg, grid);
  CHECK(c.lower.size() == 6);
  CHECK(c.lower[0] == 0.0);  // 100 - 0.25 * 400 = 0
  CHECK(c.upper[0] == 600.0);
  CHECK(c.lower[1] == 0.0);
  CHECK(c.upper[1] == 200.0);
  CHECK(c.lower[2] == 0.0);
  CHECK(c.upper[2] == 100.0);

  std::ostringstream out;
  write_convergence_csv({{1, 1.5, 0.0}}, out);
  CHECK(out.str() == "iteration,best_cost,violation_total\n1,1.5,0\n");
  std::ostringstream traj;
  auto p = spline_path(std::vector<Vec3>{Vec3(0, 0, 0), Vec3(10, 0, 0)}, 3, VehicleLimits{}, env::CurrentField{});
  write_trajectory_csv(p, traj);
  CHECK(traj.str().rfind("t,X,Y,Z,psi,theta,u,v,w\n", 0) == 0);
  const std::string text = traj.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);

  CHECK(parse_algorithm("fa") == Algorithm::FA);
  CHECK_THROWS_AS(parse_algorithm("GA"), InvalidInput);
}
