// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "auv/bench/campaign.h"
#include "auv/bench/scenario.h"
#include "auv/env/current.h"
#include "auv/exec/mission.h"
#include "auv/graph/graph.h"
#include "auv/opp/operators.h"
#include "auv/opp/solver.h"
#include "auv/tamp/operators.h"
#include "auv/tamp/solver.h"
#include "oracles.h"

using namespace auv;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool close(double a, double b, double rel = 1e-12) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

double median(std::vector<double> v) { return v.empty() ? NAN : bench::quantile(std::move(v), 0.5); }

std::string dump(const exec::MissionReport& r) {
  std::ostringstream o;
  exec::write_report_json(r, o);
  exec::write_transcript(r, o);
  exec::write_legs_csv(r, o);
  return o.str();
}

std::string records_text(const std::vector<bench::RunRecord>& rs) {
  std::ostringstream o;
  bench::write_records_csv(rs, o);
  return o.str();
}

bool conserved(const bench::RunRecord& r) { return r.conservation_error <= 1e-9; }

// Campaign records shared between criteria.
std::vector<bench::RunRecord> budget_records;
std::vector<bench::RunRecord> residual_records;
bench::Scenario residual_scenario;
bench::CampaignOptions residual_options;

// ---------------------------------------------------------------------------

Outcome time_budget_compliance() {
  bench::GenerateParams gp;
  gp.total_time_s = 3.42e4;
  gp.time_threshold_s = 3.42e4;
  gp.current_snapshots = 2;
  const auto s = bench::generate_scenario(2024, gp);
  bench::CampaignOptions o;
  o.runs = 30;
  o.seed = 1;
  budget_records = bench::run_campaign(s, o);

  int within = 0, zero = 0, errors = 0, clean_paths = 0;
  for (const auto& r : budget_records) {
    if (r.error.rfind("error:", 0) == 0) ++errors;
    within += r.route_time_s < s.time_threshold_s;
    zero += r.route_violation == 0.0;
    clean_paths += r.path_violation == 0.0;
  }
  const double n = double(budget_records.size());
  Outcome out;
  out.pass = budget_records.size() == 480 && errors == 0 && within == int(n) && zero >= 0.95 * n;
  out.detail = fmt("%zu records, %d errors, T_R < T_tau in %d, route violation 0 in %.1f%%, path violation 0 in %.1f%%",
                   budget_records.size(), errors, within, 100.0 * zero / n, 100.0 * clean_paths / n);
  return out;
}

Outcome residual_time() {
  residual_scenario = bench::generate_scenario(2025, [] {
    bench::GenerateParams gp;
    gp.total_time_s = 10800.0;
    gp.current_snapshots = 2;
    return gp;
  }());
  residual_options.runs = 30;
  residual_options.seed = 2;
  residual_options.pairs = bench::parse_pairs("GA+DE,PSO+FA,ACO+BBO,BBO+PSO");
  residual_records = bench::run_campaign(residual_scenario, residual_options);

  Outcome out;
  for (const auto& pair : residual_options.pairs) {
    std::vector<double> res;
    for (const auto& r : residual_records)
      if (r.pair() == pair.name() && r.success) res.push_back(r.residual_s);
    const auto nonneg = std::count_if(res.begin(), res.end(), [](double x) { return x >= 0.0; });
    const double frac = res.empty() ? 0.0 : double(nonneg) / double(res.size());
    const double med = median(res);
    const bool ok = !res.empty() && frac >= 0.9 && med < 0.15 * residual_scenario.total_time_s;
    out.pass &= ok;
    out.detail += fmt("%s%s %zu ok, residual>=0 %.0f%%, median %.0f s", out.detail.empty() ? "" : "; ",
                      pair.name().c_str(), res.size(), 100.0 * frac, med);
  }
  return out;
}

exec::Mission switch_mission() {
  env::CurrentField adverse({env::Vortex{Vec2(4000, 3000), 2000.0, 19880.0}});
  graph::MissionGraph g({Vec3(1000, 5000, 50), Vec3(3000, 5000, 50), Vec3(5000, 5000, 50), Vec3(7000, 5000, 50),
                         Vec3(5000, 7000, 50)},
                        {{0, 1, 0, 4.0}, {1, 2, 1, 9.0}, {2, 3, 2, 9.0}, {1, 4}, {4, 3}, {2, 4, 3, 2.0}}, 0, 3, 2.0);
  exec::Mission m{g,
                  std::make_shared<env::TerrainGrid>(oracle::open_water(100, 100.0)),
                  {std::make_shared<env::CurrentField>(), std::make_shared<env::CurrentField>(adverse)},
                  {{100.0, 1}},
                  std::make_shared<std::vector<env::Obstacle>>()};
  m.total_time_s = 8000.0;
  return m;
}

Outcome replanning_restitution() {
  const auto m = switch_mission();
  Outcome out;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    exec::ExecConfig cfg;
    cfg.accounting = exec::Accounting::Deterministic;
    cfg.seed = seed;
    const auto a = exec::run_mission(m, cfg);
    const auto b = exec::run_mission(m, cfg);
    const bool ok = a.success && a.replans >= 1 && a.residual_s >= 0.0 && dump(a) == dump(b);
    out.pass &= ok;
    out.detail += fmt("%sseed %d: r=%d residual %.0f s%s", seed == 1 ? "" : "; ", int(seed), a.replans, a.residual_s,
                      dump(a) == dump(b) ? "" : " NONDETERMINISTIC");
  }
  return out;
}

opp::Environment obstacle_env() {
  opp::Environment e;
  e.terrain = std::make_shared<env::TerrainGrid>(oracle::open_water(100, 100.0));
  env::VortexFieldParams mild;
  mild.peak_speed_max = 0.25;
  e.current = std::make_shared<env::CurrentField>(env::random_current_field(7, 10000, 10000, mild));
  e.obstacles = std::make_shared<std::vector<env::Obstacle>>(std::vector<env::Obstacle>{
      env::Obstacle{Vec3(2500, 5000, 50), 300.0}});
  return e;
}

const Vec3 kStart(1000, 5000, 50), kGoal(4000, 5000, 50);
const opp::Algorithm kOppAlgs[] = {opp::Algorithm::DE, opp::Algorithm::FA, opp::Algorithm::BBO, opp::Algorithm::PSO};
std::vector<opp::OppResult> converged;

Outcome convergence_monotonicity() {
  const auto env = obstacle_env();
  Outcome out;
  for (auto alg : kOppAlgs) {
    int good = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      opp::OppConfig c;
      c.algorithm = alg;
      c.population = 30;
      c.iterations = 100;
      c.seed = seed;
      auto r = opp::solve_opp(kStart, kGoal, env, c);
      bool ok = !r.log.empty() && !r.violated && r.path.violations.weighted_total(c.weights) == 0.0 &&
                r.log.back().violation_total == 0.0;
      for (std::size_t i = 1; i < r.log.size(); ++i)
        ok &= r.log[i].best_cost <= r.log[i - 1].best_cost && r.log[i].violation_total <= r.log[i - 1].violation_total;
      good += ok;
      converged.push_back(std::move(r));
    }
    out.pass &= good == 10;
    out.detail += fmt("%s%s %d/10", alg == opp::Algorithm::DE ? "" : ", ", opp::to_string(alg), good);
  }
  return out;
}

Outcome kinodynamic_bounds() {
  const opp::VehicleLimits lim;
  Outcome out;
  double surge = 0, sway = 0, yaw = 0;
  std::size_t samples = 0;
  for (const auto& r : converged) {
    for (const auto& s : r.path.samples) {
      surge = std::max(surge, std::abs(s.u));
      sway = std::max(sway, std::abs(s.v));
      yaw = std::max(yaw, std::abs(s.yaw_rate));
      ++samples;
    }
  }
  out.pass = !converged.empty() && surge <= lim.surge_max_mps && sway <= lim.sway_max_mps && yaw <= lim.yaw_rate_max;
  out.detail = fmt("%zu paths, %zu samples, max |u| %.3f (%.2f), |v| %.3f (%.2f), |yaw rate| %.4f (%.2f)",
                   converged.size(), samples, surge, lim.surge_max_mps, sway, lim.sway_max_mps, yaw, lim.yaw_rate_max);
  return out;
}

Outcome routing_oracle() {
  const tamp::Algorithm algs[] = {tamp::Algorithm::ACO, tamp::Algorithm::BBO, tamp::Algorithm::GA,
                                  tamp::Algorithm::PSO};
  int combos = 0, passing = 0;
  int near_total = 0, exact_total = 0, runs = 0;
  int min_near = 20, min_exact = 20;
  for (std::uint64_t gs = 0; gs < 25; ++gs) {
    const int k = 5 + int(gs % 5);
    graph::GraphParams p;
    p.node_count = k;
    p.edge_density = 0.5;
    const auto tasks = graph::sample_tasks(500 + gs, std::max(1, k / 2));
    const auto g = graph::build_graph(oracle::open_water(20, 100.0), p, tasks, 500 + gs);
    double shortest = INFINITY;
    for (const auto& r : oracle::all_simple_paths(g)) shortest = std::min(shortest, oracle::stats(g, r).time);
    // Binding but always satisfiable.
    const double threshold = 0.6 * oracle::longest_simple_time(g) + 0.4 * shortest;
    const double opt = oracle::best_cost(g, threshold);
    for (auto alg : algs) {
      int near = 0, exact = 0;
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        tamp::TampConfig c;
        c.algorithm = alg;
        c.population = 50;
        c.iterations = 200;
        c.time_threshold_s = threshold;
        c.seed = seed;
        const auto r = tamp::solve_tamp(g, c);
        if (!r.found) continue;
        const double cost = oracle::route_cost(g, r.route, threshold);
        near += cost <= opt * 1.02;
        exact += close(cost, opt);
      }
      ++combos;
      passing += near >= 16 && exact >= 10;
      near_total += near;
      exact_total += exact;
      runs += 20;
      min_near = std::min(min_near, near);
      min_exact = std::min(min_exact, exact);
    }
  }
  Outcome out;
  out.pass = passing == combos;
  out.detail = fmt("%d/%d graph-algorithm pairs pass; within 2%% %d/%d, exact %d/%d; worst pair %d/20 within 2%%, %d/20 exact",
                   passing, combos, near_total, runs, exact_total, runs, min_near, min_exact);
  return out;
}

Outcome straight_corridor() {
  opp::Environment e;
  e.terrain = std::make_shared<env::TerrainGrid>(oracle::open_water(100, 100.0));
  e.current = std::make_shared<env::CurrentField>();
  e.obstacles = std::make_shared<std::vector<env::Obstacle>>();
  const double d = (kGoal - kStart).norm();
  Outcome out;
  for (auto alg : kOppAlgs) {
    int good = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      opp::OppConfig c;
      c.algorithm = alg;
      c.population = 30;
      c.iterations = 100;
      c.seed_straight = false;
      c.seed = seed;
      const auto r = opp::solve_opp(kStart, kGoal, e, c);
      const double excess = r.path.arc_length_m / d - 1.0;
      good += excess <= 0.01;
      worst = std::max(worst, excess);
    }
    out.pass &= good >= 18;
    out.detail += fmt("%s%s %d/20 (worst +%.2f%%)", alg == opp::Algorithm::DE ? "" : ", ", opp::to_string(alg), good,
                      100.0 * worst);
  }
  return out;
}

Outcome current_physics() {
  const double side = std::sqrt(3.5e6);
  double worst = 0.0;
  int points = 0;
  bool centers = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto field = env::random_current_field(900 + seed, side, side);
    double l_min = INFINITY, u_peak = 0.0;
    for (const auto& v : field.vortices()) {
      l_min = std::min(l_min, v.radius_m);
      u_peak = std::max(u_peak, env::vortex_peak_speed(v.strength, v.radius_m));
      const Vec2 c = env::vortex_velocity(v, v.center);
      centers &= c.x() == 0.0 && c.y() == 0.0;
      const Vec2 single = env::CurrentField({v}).at(v.center);
      centers &= single.x() == 0.0 && single.y() == 0.0;
    }
    Rng rng(derive_seed(77, {seed}));
    std::uniform_real_distribution<double> U(0.0, side);
    const double h = 1e-4 * l_min;
    for (int i = 0; i < 1000; ++i, ++points) {
      const Vec2 p(U(rng), U(rng));
      const double dudx = (field.at(Vec2(p.x() + h, p.y())).x() - field.at(Vec2(p.x() - h, p.y())).x()) / (2 * h);
      const double dvdy = (field.at(Vec2(p.x(), p.y() + h)).y() - field.at(Vec2(p.x(), p.y() - h)).y()) / (2 * h);
      worst = std::max(worst, std::abs(dudx + dvdy) * l_min / u_peak);
    }
  }
  Outcome out;
  out.pass = points == 10000 && worst < 1e-6 && centers;
  out.detail = fmt("%d points, max scaled |div| %.2e, centers exactly zero: %s", points, worst, centers ? "yes" : "no");
  return out;
}

VecX vec(std::initializer_list<double> v) {
  VecX x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

Outcome formula_examples() {
  std::vector<std::pair<std::string, bool>> checks;
  {
    const std::vector<double> tau{2, 1}, eta{1, 1};
    const auto p = tamp::aco_transition_prob(1.0, 1.0, tau, eta);
    checks.emplace_back("aco transition", close(p[0], 2.0 / 3.0) && close(p[1], 1.0 / 3.0));
  }
  {
    graph::MissionGraph g({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}, {{0, 1}, {1, 2}}, 0, 2, 1.0);
    tamp::AcoParams p;
    std::vector<double> trails{1.0, 1.0};
    const std::vector<int> best{0, 1};
    tamp::aco_update_pheromone(p, trails, g, best, 2.0);
    checks.emplace_back("pheromone update", close(trails[0], 1.4) && close(trails[1], 0.9));
  }
  {
    const auto [lambda, mu] = tamp::bbo_rates(5, 10, 1, 1);
    checks.emplace_back("bbo rates", close(lambda, 0.5) && close(mu, 0.5) && close(lambda + mu, 1.0));
  }
  checks.emplace_back("bbo mutation rate", close(tamp::bbo_mutation_rate(0.25, 1.0, 0.2), 0.15));
  {
    tamp::PsoParams p{0.5, 0.0, 0.0};
    VecX x = vec({3.0}), v = vec({2.0});
    const VecX r = vec({0.5});
    tamp::pso_update(p, x, v, vec({7.0}), vec({-4.0}), r, r);
    checks.emplace_back("pso update", close(v[0], 1.0) && close(x[0], 4.0));
  }
  {
    VecX x = vec({3, 1, 2});
    tamp::swap_mutation(x, 1, 2);
    checks.emplace_back("ga swap mutation", x == vec({3, 2, 1}));
  }
  checks.emplace_back("de mutation", opp::de_mutate(vec({3, 0}), vec({1, 0}), vec({1, 1}), 0.5) == vec({2, 1}));
  checks.emplace_back("de crossover",
                      opp::de_crossover(vec({0, 0, 0}), vec({9, 9, 9}), {false, true, false}) == vec({0, 9, 0}));
  {
    const VecX parent = vec({1}), trial = vec({2});
    checks.emplace_back("de selection", &opp::de_select(parent, trial, 20.0, 21.0) == &parent);
  }
  {
    const VecX moved = opp::fa_move(vec({0, 0}), vec({2, 0}), 1.0, 1.0, 1.0, 0.0, vec({0.3, -0.2}));
    checks.emplace_back("firefly move", close(moved[0], 2.0 * std::exp(-1.0)) && moved[1] == 0.0);
  }
  Outcome out;
  int passed = 0;
  for (const auto& [name, ok] : checks) {
    passed += ok;
    if (!ok) out.detail += name + " failed; ";
  }
  out.pass = passed == int(checks.size());
  out.detail += fmt("%d/%zu examples", passed, checks.size());
  return out;
}

Outcome determinism_and_accounting() {
  const auto m = bench::build_mission(residual_scenario);
  int identical = 0, balanced = 0, total = 0;
  for (const auto& pair : bench::all_pairs()) {
    auto cfg = bench::exec_config(residual_scenario, pair.tamp, pair.opp, 11);
    cfg.accounting = exec::Accounting::Deterministic;
    const auto a = exec::run_mission(m, cfg);
    const auto b = exec::run_mission(m, cfg);
    cfg.mode = exec::Mode::Concurrent;
    const auto c = exec::run_mission(m, cfg);
    identical += dump(a) == dump(b) && dump(a) == dump(c);
    for (const auto* r : {&a, &b, &c}) balanced += r->conservation_error() <= 1e-9;
    ++total;
  }
  int campaign_ok = 0, campaign_total = 0;
  for (const auto* set : {&budget_records, &residual_records}) {
    for (const auto& r : *set) {
      campaign_ok += conserved(r);
      ++campaign_total;
    }
  }
  Outcome out;
  out.pass = identical == total && balanced == 3 * total && campaign_ok == campaign_total && campaign_total > 0;
  out.detail = fmt("%d/%d pairs byte-identical across repeat and concurrent runs, %d/%d reports conserve time, "
                   "%d/%d campaign missions conserve time",
                   identical, total, balanced, 3 * total, campaign_ok, campaign_total);
  return out;
}

Outcome parallelism_independence() {
  auto o = residual_options;
  o.parallelism = 8;
  const auto par = bench::run_campaign(residual_scenario, o);
  const bool same = records_text(par) == records_text(residual_records);
  int balanced = 0;
  for (const auto& r : par) balanced += conserved(r);
  Outcome out;
  out.pass = same && balanced == int(par.size());
  out.detail = fmt("%zu records at parallelism 8 %s the parallelism 1 set; %d conserve time", par.size(),
                   same ? "match" : "DIFFER FROM", balanced);
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "time-budget compliance", time_budget_compliance},
      {2, "residual time", residual_time},
      {3, "re-planning restitution", replanning_restitution},
      {4, "convergence monotonicity", convergence_monotonicity},
      {5, "kinodynamic bounds", kinodynamic_bounds},
      {6, "routing oracle equivalence", routing_oracle},
      {7, "straight-corridor optimum", straight_corridor},
      {8, "current-field physics", current_physics},
      {9, "formula examples", formula_examples},
      {10, "determinism and accounting", determinism_and_accounting},
      {11, "parallelism independence", parallelism_independence},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
