#include "auv/tamp/solver.h"

#include <algorithm>
#include <chrono>
#include <cctype>
#include <map>
#include <numeric>
#include <ostream>

namespace auv::tamp {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::ACO: return "ACO";
    case Algorithm::BBO: return "BBO";
    case Algorithm::GA: return "GA";
    case Algorithm::PSO: return "PSO";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string up(name);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "ACO") return Algorithm::ACO;
  if (up == "BBO") return Algorithm::BBO;
  if (up == "GA") return Algorithm::GA;
  if (up == "PSO") return Algorithm::PSO;
  throw InvalidInput("unknown routing algorithm '" + std::string(name) + "'");
}

void TampConfig::validate() const {
  if (population < 2) throw InvalidInput("population must be >= 2");
  if (iterations < 1) throw InvalidInput("iterations must be >= 1");
  if (!(time_threshold_s > 0.0)) throw InvalidInput("time threshold must be positive");
  if (!(aco.evaporation > 0.0 && aco.evaporation <= 1.0)) throw InvalidInput("evaporation must be in (0, 1]");
  if (!(pso.velocity_min < pso.velocity_max)) throw InvalidInput("empty PSO velocity range");
  if (!(ga.mix_ratio >= 0.0 && ga.mix_ratio <= 1.0)) throw InvalidInput("mix ratio must be in [0, 1]");
}

void write_iteration_csv(const std::vector<TampIteration>& log, std::ostream& out) {
  out << "iteration,best_cost,best_time_s,best_weight\n";
  char buf[128];
  for (const auto& it : log) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g\n", it.iteration, it.best_cost, it.best_time_s,
                  it.best_weight);
    out << buf;
  }
}

namespace {

constexpr double kPriorityRange = 100.0;

std::vector<int> free_genes(const graph::MissionGraph& g) {
  std::vector<int> genes;
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (v != g.start()) genes.push_back(v);
  }
  return genes;
}

VecX random_genome(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(-kPriorityRange, kPriorityRange);
  VecX x(n);
  for (int j = 0; j < n; ++j) x[j] = u(rng);
  return x;
}

bool better(const Individual& a, const Individual& b) { return a.cost < b.cost; }

void sort_by_cost(std::vector<Individual>& pop) { std::stable_sort(pop.begin(), pop.end(), better); }

class Tracker {
 public:
  explicit Tracker(Individual seed) : best_(std::move(seed)) {}

  void offer(const Individual& ind) {
    if (ind.cost < best_.cost) best_ = ind;
  }
  void log(int iteration) {
    TampIteration it;
    it.iteration = iteration;
    it.best_cost = best_.cost;
    if (best_.route) {
      it.best_time_s = best_.eval.time_s;
      it.best_weight = best_.eval.total_weight;
    }
    log_.push_back(it);
  }
  const Individual& best() const { return best_; }
  std::vector<TampIteration>& entries() { return log_; }

 private:
  Individual best_;
  std::vector<TampIteration> log_;
};

std::vector<Individual> initial_population(const RouteProblem& problem, int size, const VecX& seed_genome,
                                           Rng& rng) {
  std::vector<Individual> pop;
  pop.reserve(static_cast<std::size_t>(size));
  pop.push_back(problem.evaluate(seed_genome));
  while (static_cast<int>(pop.size()) < size) pop.push_back(problem.evaluate(random_genome(problem.dimension(), rng)));
  return pop;
}

// ---- GA ----

void run_ga(const TampConfig& cfg, const RouteProblem& problem, const VecX& seed_genome, Rng& rng,
            Tracker& tr) {
  auto pop = initial_population(problem, cfg.population, seed_genome, rng);
  for (const auto& ind : pop) tr.offer(ind);
  double last_best = tr.best().cost;
  int stall = 0;
  for (int t = 1; t <= cfg.iterations; ++t) {
    pop = ga_step(cfg.ga, problem, std::move(pop), rng);
    for (const auto& ind : pop) tr.offer(ind);
    tr.log(t);
    if (tr.best().cost < last_best) {
      last_best = tr.best().cost;
      stall = 0;
    } else if (++stall >= cfg.ga.stall_generations) {
      break;
    }
  }
}

// ---- BBO ----

void run_bbo(const TampConfig& cfg, const RouteProblem& problem, const VecX& seed_genome, Rng& rng,
             Tracker& tr) {
  const int n = cfg.population;
  const auto genes = free_genes(problem.graph());
  auto pop = initial_population(problem, n, seed_genome, rng);
  for (const auto& ind : pop) tr.offer(ind);
  const auto species_p = bbo_species_probabilities(n - 1, cfg.bbo.immigration, cfg.bbo.emigration);
  const double p_max = *std::max_element(species_p.begin(), species_p.end());
  std::uniform_real_distribution<double> u01(0.0, 1.0), uprio(-kPriorityRange, kPriorityRange);
  std::uniform_int_distribution<std::size_t> pick_gene(0, genes.empty() ? 0 : genes.size() - 1);

  for (int t = 1; t <= cfg.iterations; ++t) {
    sort_by_cost(pop);
    std::vector<double> lambda(static_cast<std::size_t>(n)), mu(static_cast<std::size_t>(n)), m(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const int species = n - 1 - i;
      auto [l, e] = bbo_rates(species, n - 1, cfg.bbo.immigration, cfg.bbo.emigration);
      lambda[static_cast<std::size_t>(i)] = l;
      mu[static_cast<std::size_t>(i)] = e;
      m[static_cast<std::size_t>(i)] =
          bbo_mutation_rate(species_p[static_cast<std::size_t>(species)], p_max, cfg.bbo.mutation_max);
    }
    std::vector<VecX> snapshot;
    snapshot.reserve(pop.size());
    for (const auto& ind : pop) snapshot.push_back(ind.genome);

    std::vector<Individual> next;
    next.reserve(pop.size());
    for (int i = 0; i < n; ++i) {
      VecX x = snapshot[static_cast<std::size_t>(i)];
      if (!genes.empty() && u01(rng) < lambda[static_cast<std::size_t>(i)]) {
        for (std::size_t rep = 0; rep < genes.size(); ++rep) {
          auto j = roulette(mu, rng);
          if (u01(rng) < mu[j]) {
            int d = genes[pick_gene(rng)];
            x[d] = snapshot[j][d];
          }
        }
      }
      for (int d : genes) {
        if (u01(rng) < m[static_cast<std::size_t>(i)]) x[d] = uprio(rng);
      }
      next.push_back(problem.evaluate(std::move(x)));
    }
    sort_by_cost(next);
    const int elites = std::clamp(cfg.bbo.elites, 0, n);
    for (int e = 0; e < elites; ++e) {
      auto& slot = next[static_cast<std::size_t>(n - 1 - e)];
      if (pop[static_cast<std::size_t>(e)].cost < slot.cost) slot = pop[static_cast<std::size_t>(e)];
    }
    pop = std::move(next);
    for (const auto& ind : pop) tr.offer(ind);
    tr.log(t);
  }
}

// ---- PSO ----

void run_pso(const TampConfig& cfg, const RouteProblem& problem, const VecX& seed_genome, Rng& rng,
             Tracker& tr) {
  const int n = cfg.population;
  const int dim = problem.dimension();
  auto particles = initial_population(problem, n, seed_genome, rng);
  std::uniform_real_distribution<double> uv(cfg.pso.velocity_min, cfg.pso.velocity_max);
  std::vector<VecX> vel;
  for (int i = 0; i < n; ++i) {
    VecX v(dim);
    for (int j = 0; j < dim; ++j) v[j] = uv(rng);
    vel.push_back(v);
  }
  std::vector<Individual> pbest = particles;
  std::size_t g = 0;
  for (std::size_t i = 1; i < pbest.size(); ++i) {
    if (pbest[i].cost < pbest[g].cost) g = i;
  }
  for (const auto& ind : particles) tr.offer(ind);

  for (int t = 1; t <= cfg.iterations; ++t) {
    const VecX gbest = pbest[g].genome;
    for (int i = 0; i < n; ++i) {
      auto idx = static_cast<std::size_t>(i);
      VecX x = particles[idx].genome;
      pso_update(cfg.pso, x, vel[idx], pbest[idx].genome, gbest, rng);
      particles[idx] = problem.evaluate(std::move(x));
      if (particles[idx].cost < pbest[idx].cost) pbest[idx] = particles[idx];
      tr.offer(particles[idx]);
    }
    for (std::size_t i = 0; i < pbest.size(); ++i) {
      if (pbest[i].cost < pbest[g].cost) g = i;
    }
    tr.log(t);
  }
}

// ---- ACO ----

void run_aco(const TampConfig& cfg, const RouteProblem& problem, Rng& rng, Tracker& tr) {
  const auto& g = problem.graph();
  const auto lb = graph::time_to_destination(g);
  const double budget = problem.threshold();
  std::vector<double> trails(static_cast<std::size_t>(g.edge_count()), cfg.aco.initial_trail);
  std::vector<double> eta(static_cast<std::size_t>(g.edge_count()));
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    eta[static_cast<std::size_t>(e)] = ed.weight / std::max(ed.time_s, 1e-9);
  }
  double alpha = cfg.aco.alpha, beta = cfg.aco.beta;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const auto nv = static_cast<std::size_t>(g.vertex_count());

  for (int t = 1; t <= cfg.iterations; ++t) {
    Individual iter_best;
    for (int ant = 0; ant < cfg.population; ++ant) {
      std::vector<char> visited(nv, 0);
      graph::Route route{g.start()};
      visited[static_cast<std::size_t>(g.start())] = 1;
      double elapsed = 0.0;
      bool dead = false;
      while (route.back() != g.destination()) {
        const int v = route.back();
        std::vector<int> hood, edges;
        std::vector<double> tau, heur;
        for (int u : g.neighbors(v)) {
          const int e = g.edge_index(v, u);
          const double te = g.edge(e).time_s;
          if (visited[static_cast<std::size_t>(u)] || !(elapsed + te + lb[static_cast<std::size_t>(u)] < budget)) continue;
          hood.push_back(u);
          edges.push_back(e);
          tau.push_back(trails[static_cast<std::size_t>(e)]);
          heur.push_back(eta[static_cast<std::size_t>(e)]);
        }
        if (hood.empty()) {
          dead = true;  // ant discarded
          break;
        }
        auto probs = aco_transition_prob(alpha, beta, tau, heur);
        double r = u01(rng), acc = 0.0;
        std::size_t k = probs.size() - 1;
        for (std::size_t j = 0; j < probs.size(); ++j) {
          acc += probs[j];
          if (r < acc) {
            k = j;
            break;
          }
        }
        route.push_back(hood[k]);
        visited[static_cast<std::size_t>(hood[k])] = 1;
        elapsed += g.edge(edges[k]).time_s;
      }
      if (dead) continue;
      Individual ind;
      ind.route = route;
      ind.eval = problem.evaluate_route(route);
      ind.cost = ind.eval.penalized_cost();
      if (ind.cost < iter_best.cost) iter_best = ind;
    }
    if (iter_best.route) {
      tr.offer(iter_best);
      aco_update_pheromone(cfg.aco, trails, g, *iter_best.route, iter_best.cost);
    } else {
      aco_update_pheromone(cfg.aco, trails, g, *tr.best().route, tr.best().cost);
    }
    if (cfg.aco.decay_exponents) {
      alpha *= cfg.aco.exponent_decay;
      beta *= cfg.aco.exponent_decay;
    }
    tr.log(t);
  }
}

}  // namespace

std::vector<Individual> ga_step(const GaParams& params, const RouteProblem& problem,
                                std::vector<Individual> population, Rng& rng) {
  const std::size_t n = population.size();
  if (n < 2) throw InvalidInput("GA population must be >= 2");
  const auto genes = free_genes(problem.graph());
  std::vector<double> fitness(n);
  for (std::size_t i = 0; i < n; ++i) {
    fitness[i] = std::isfinite(population[i].cost) && population[i].cost > 0.0 ? 1.0 / population[i].cost : 0.0;
  }
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Individual> pool = population;
  for (std::size_t c = 0; c < n; ++c) {
    const auto& a = population[roulette(fitness, rng)].genome;
    const auto& b = population[roulette(fitness, rng)].genome;
    VecX child = uniform_crossover(a, b, params.mix_ratio, rng);
    if (u01(rng) < params.mutation_rate) random_mutation(child, genes, rng);
    pool.push_back(problem.evaluate(std::move(child)));
  }
  sort_by_cost(pool);
  std::vector<Individual> next;
  std::vector<Individual> spare;
  std::vector<graph::Route> seen;
  for (auto& ind : pool) {
    bool dup = !ind.route || std::find(seen.begin(), seen.end(), *ind.route) != seen.end();
    if (!dup && next.size() < n) {
      seen.push_back(*ind.route);
      next.push_back(std::move(ind));
    } else {
      spare.push_back(std::move(ind));
    }
  }
  for (std::size_t i = 0; next.size() < n; ++i) next.push_back(std::move(spare[i]));
  return next;
}

TampResult solve_tamp(const graph::MissionGraph& g, const TampConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RouteProblem problem(g, cfg.time_threshold_s, cfg.coefficients);
  TampResult res;

  auto fastest = graph::min_time_route(g);
  Individual seed;
  if (fastest) {
    auto prio = graph::encode_route(g, *fastest);
    seed.genome = Eigen::Map<const VecX>(prio.data(), static_cast<Eigen::Index>(prio.size()));
    seed.route = *fastest;
    seed.eval = problem.evaluate_route(*fastest);
    seed.cost = seed.eval.penalized_cost();
  }
  if (!fastest || !std::isfinite(seed.cost)) {
    res.compute_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }

  Rng rng(cfg.seed);
  Tracker tr(seed);
  switch (cfg.algorithm) {
    case Algorithm::GA: run_ga(cfg, problem, seed.genome, rng, tr); break;
    case Algorithm::BBO: run_bbo(cfg, problem, seed.genome, rng, tr); break;
    case Algorithm::PSO: run_pso(cfg, problem, seed.genome, rng, tr); break;
    case Algorithm::ACO: run_aco(cfg, problem, rng, tr); break;
  }
  const auto& best = tr.best();
  res.found = true;
  res.route = *best.route;
  res.eval = best.eval;
  res.evaluations = problem.evaluations();
  res.log = std::move(tr.entries());
  res.compute_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace auv::tamp
