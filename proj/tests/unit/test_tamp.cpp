#include <doctest.h>

#include <sstream>

#include "auv/graph/graph.h"
#include "auv/tamp/operators.h"
#include "auv/tamp/route_eval.h"
#include "auv/tamp/solver.h"
#include "oracles.h"

using namespace auv;
using namespace auv::graph;
using namespace auv::tamp;

namespace {

// Straight chain of edges with the given lengths along x.
MissionGraph chain(const std::vector<double>& lengths, double speed) {
  std::vector<Vec3> pts{Vec3::Zero()};
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    pts.push_back(pts.back() + Vec3(lengths[i], 0, 0));
    edges.push_back(Edge{int(i), int(i + 1)});
  }
  return MissionGraph(pts, edges, 0, int(lengths.size()), speed);
}

VecX vec(std::initializer_list<double> v) {
  VecX x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

MissionGraph small_random_graph(std::uint64_t seed, int k) {
  GraphParams p;
  p.node_count = k;
  p.edge_density = 0.5;
  auto tasks = sample_tasks(seed, std::max(1, k / 2));
  return build_graph(oracle::open_water(20, 100.0), p, tasks, seed);
}

}  // namespace

TEST_CASE("route time and cost") {
  auto one = chain({100}, 2.0);
  CHECK(route_time(one, Route{0, 1}) == 50.0);
  auto three = chain({100, 200, 300}, 2.5);
  CHECK(route_time(three, Route{0, 1, 2, 3}) == doctest::Approx(240.0).epsilon(1e-15));
  std::vector<Vec3> solo{Vec3::Zero()};
  MissionGraph trivial(solo, {}, 0, 0, 1.0);
  CHECK(route_time(trivial, Route{0}) == 0.0);
  CHECK_THROWS_AS(route_time(three, Route{0, 2, 3}), InvalidInput);

  auto ev = route_cost(one, Route{0, 1}, 50.0);
  CHECK(ev.cost == doctest::Approx(1.0 / 1.0));
  CHECK(ev.hard_violation);
  CHECK(ev.penalized_cost() == kInf);
  auto ok = route_cost(one, Route{0, 1}, 100.0);
  CHECK(ok.cost == doctest::Approx(0.5 + 1.0));
  CHECK_FALSE(ok.hard_violation);
  CHECK(ok.time_violation_s == 0.0);

  // Weight monotonicity at equal time deviation.
  std::vector<Vec3> pts{Vec3::Zero(), Vec3(10, 0, 0)};
  MissionGraph light(pts, {Edge{0, 1, 0, 10.0}}, 0, 1, 1.0);
  MissionGraph heavy(pts, {Edge{0, 1, 0, 100.0}}, 0, 1, 1.0);
  CHECK(route_cost(heavy, Route{0, 1}, 20).cost < route_cost(light, Route{0, 1}, 20).cost);
  MissionGraph at_threshold(pts, {Edge{0, 1, 0, 8.0}}, 0, 1, 1.0);
  CHECK(route_cost(at_threshold, Route{0, 1}, 10.0).cost == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("ACO transition probabilities") {
  std::vector<double> one{3.0};
  CHECK(aco_transition_prob(1, 1, one, one)[0] == 1.0);
  std::vector<double> four(4, 2.0);
  for (double p : aco_transition_prob(1, 1, four, four)) CHECK(p == 0.25);
  std::vector<double> tau{2, 1}, eta{1, 1};
  auto p = aco_transition_prob(1, 1, tau, eta);
  CHECK(p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(aco_transition_prob(1, 1, std::vector<double>{}, std::vector<double>{}), DeadEnd);

  Rng rng(1);
  std::uniform_real_distribution<double> u(1e-3, 10);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> t(1 + i % 9), e(t.size());
    for (auto& v : t) v = u(rng);
    for (auto& v : e) v = u(rng);
    auto q = aco_transition_prob(0.7, 1.3, t, e);
    double sum = 0;
    for (double v : q) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("ACO pheromone update") {
  auto g = chain({1, 1, 1}, 1.0);
  AcoParams p;
  std::vector<double> trails(3, 1.0);
  aco_update_pheromone(p, trails, g, Route{0, 1}, 2.0);
  CHECK(trails[0] == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(trails[1] == doctest::Approx(0.9).epsilon(1e-15));
  p.deposit = 0.0;
  std::vector<double> pure(3, 1.0);
  aco_update_pheromone(p, pure, g, Route{0, 1, 2, 3}, 1.0);
  for (double t : pure) CHECK(t == doctest::Approx(0.9));
  std::vector<double> tiny(3, 1e-12);
  aco_update_pheromone(p, tiny, g, Route{0, 1}, 1.0);
  for (double t : tiny) CHECK(t >= p.trail_floor);
}

TEST_CASE("BBO rates, species probabilities and mutation rate") {
  CHECK(bbo_rates(0, 10, 1, 1) == std::pair<double, double>(1.0, 0.0));
  CHECK(bbo_rates(10, 10, 1, 1) == std::pair<double, double>(0.0, 1.0));
  CHECK(bbo_rates(5, 10, 1, 1) == std::pair<double, double>(0.5, 0.5));
  for (int s = 0; s <= 37; ++s) {
    auto [l, m] = bbo_rates(s, 37, 0.8, 0.8);
    CHECK(l + m == doctest::Approx(0.8).epsilon(1e-15));
  }
  CHECK_THROWS_AS(bbo_rates(11, 10, 1, 1), InvalidInput);
  CHECK_THROWS_AS(bbo_rates(-1, 10, 1, 1), InvalidInput);

  // Stationary distribution of the birth-death chain versus the binomial
  // closed form.
  for (auto [i, e] : {std::pair{1.0, 1.0}, std::pair{1.0, 3.0}, std::pair{2.0, 0.5}}) {
    const int n = 12;
    auto ps = bbo_species_probabilities(n, i, e);
    double q = i / (i + e);
    for (int s = 0; s <= n; ++s) {
      double binom = std::tgamma(n + 1) / (std::tgamma(s + 1) * std::tgamma(n - s + 1)) *
                     std::pow(q, s) * std::pow(1 - q, n - s);
      CHECK(ps[s] == doctest::Approx(binom).epsilon(1e-12));
    }
  }

  CHECK(bbo_mutation_rate(1.0, 1.0, 0.2) == 0.0);
  CHECK(bbo_mutation_rate(0.0, 1.0, 0.2) == 0.2);
  CHECK(bbo_mutation_rate(0.25, 1.0, 0.2) == doctest::Approx(0.15).epsilon(1e-15));
}

TEST_CASE("PSO update") {
  PsoParams p;
  VecX x = vec({1, 2}), v = VecX::Zero(2);
  Rng rng(3);
  pso_update(p, x, v, x, x, rng);
  CHECK(x == vec({1, 2}));

  p.inertia = 0;
  p.cognitive = 0;
  p.social = 1;
  x = vec({1, 2});
  v = vec({5, 5});
  VecX ones = VecX::Ones(2);
  pso_update(p, x, v, x, vec({7, -3}), ones, ones);
  CHECK(x == vec({7, -3}));

  p.inertia = 0.5;
  p.social = 0;
  x = vec({0});
  v = vec({2});
  pso_update(p, x, v, x, x, VecX::Zero(1), VecX::Zero(1));
  CHECK(v[0] == 1.0);
  CHECK(x[0] == 1.0);

  p = PsoParams{};
  x = vec({0});
  v = vec({0});
  pso_update(p, x, v, vec({1000}), vec({1000}), VecX::Ones(1), VecX::Ones(1));
  CHECK(v[0] == 100.0);
  x = vec({0});
  v = vec({0});
  pso_update(p, x, v, vec({1000}), vec({1000}), VecX::Ones(1), VecX::Ones(1), vec({3}));
  CHECK(v[0] == 3.0);
}

TEST_CASE("GA operators") {
  VecX a = vec({1, 2, 3, 4}), b = vec({5, 6, 7, 8});
  CHECK(uniform_crossover(a, a, {true, false, true, false}) == a);
  CHECK(uniform_crossover(a, b, {true, false, true, false}) == vec({5, 2, 7, 4}));

  VecX s = vec({3, 1, 2});
  swap_mutation(s, 1, 2);
  CHECK(s == vec({3, 2, 1}));
  VecX inv = vec({1, 2, 3, 4, 5});
  inversion_mutation(inv, 1, 3);
  CHECK(inv == vec({1, 4, 3, 2, 5}));
  VecX ins = vec({1, 2, 3, 4, 5});
  insertion_mutation(ins, 1, 3);
  CHECK(ins == vec({1, 3, 4, 2, 5}));
  insertion_mutation(ins, 3, 1);
  CHECK(ins == vec({1, 2, 3, 4, 5}));

  // Free genes only: gene 0 never moves.
  Rng rng(4);
  std::vector<int> free{1, 2, 3, 4};
  for (int i = 0; i < 200; ++i) {
    VecX x = vec({42, 1, 2, 3, 4});
    random_mutation(x, free, rng);
    CHECK(x[0] == 42);
    std::vector<double> sorted(x.data() + 1, x.data() + 5);
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<double>{1, 2, 3, 4});
  }

  std::vector<double> w{0, 0, 5, 0};
  for (int i = 0; i < 50; ++i) CHECK(roulette(w, rng) == 2);
}

TEST_CASE("ga_step keeps the elite") {
  auto g = small_random_graph(3, 9);
  RouteProblem prob(g, 1e5);
  Rng rng(8);
  std::vector<Individual> pop;
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 10; ++i) {
    VecX x(g.vertex_count());
    for (int j = 0; j < x.size(); ++j) x[j] = u(rng);
    pop.push_back(prob.evaluate(x));
  }
  double best = kInf;
  for (const auto& ind : pop) best = std::min(best, ind.cost);
  for (int gen = 0; gen < 30; ++gen) {
    pop = ga_step(GaParams{}, prob, pop, rng);
    CHECK(pop.size() == 10);
    double now = kInf;
    for (const auto& ind : pop) now = std::min(now, ind.cost);
    CHECK(now <= best);
    best = now;
  }
}

TEST_CASE("solve_tamp contracts") {
  auto direct = chain({100}, 2.0);
  for (auto alg : {Algorithm::ACO, Algorithm::BBO, Algorithm::GA, Algorithm::PSO}) {
    TampConfig c;
    c.algorithm = alg;
    c.time_threshold_s = 1000;
    c.iterations = 5;
    auto r = solve_tamp(direct, c);
    CHECK(r.found);
    CHECK(r.route == Route{0, 1});
  }

  TampConfig tight;
  tight.time_threshold_s = 50.0;  // equals the only route's time
  auto none = solve_tamp(direct, tight);
  CHECK_FALSE(none.found);

  CHECK(parse_algorithm("pso") == Algorithm::PSO);
  CHECK_THROWS_AS(parse_algorithm("SA"), InvalidInput);
  TampConfig bad;
  bad.population = 1;
  CHECK_THROWS_AS(solve_tamp(direct, bad), InvalidInput);
}

TEST_CASE("solvers: monotone logs, feasibility, determinism, oracle quality") {
  for (std::uint64_t gs = 0; gs < 6; ++gs) {
    auto g = small_random_graph(100 + gs, 7);
    double threshold = 0.6 * oracle::longest_simple_time(g);
    double opt = oracle::best_cost(g, threshold);
    for (auto alg : {Algorithm::ACO, Algorithm::BBO, Algorithm::GA, Algorithm::PSO}) {
      TampConfig c;
      c.algorithm = alg;
      c.population = 50;
      c.iterations = 200;
      c.time_threshold_s = threshold;
      int hits = 0;
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        c.seed = seed;
        auto r = solve_tamp(g, c);
        REQUIRE(r.found);
        CHECK(check_feasibility(g, r.route) == Feasibility::Feasible);
        CHECK(r.eval.time_s < threshold);
        for (std::size_t i = 1; i < r.log.size(); ++i) CHECK(r.log[i].best_cost <= r.log[i - 1].best_cost);
        CHECK(oracle::route_cost(g, r.route, threshold) == doctest::Approx(r.eval.cost).epsilon(1e-12));
        hits += r.eval.cost <= opt * 1.02;
        auto again = solve_tamp(g, c);
        CHECK(again.route == r.route);
        CHECK(again.eval.cost == r.eval.cost);
      }
      CHECK_MESSAGE(hits >= 4, to_string(alg) << " graph " << gs);
    }
  }
}

TEST_CASE("iteration CSV") {
  std::ostringstream out;
  write_iteration_csv({{1, 0.5, 100, 12}}, out);
  CHECK(out.str() == "iteration,best_cost,best_time_s,best_weight\n1,0.5,100,12\n");
}
