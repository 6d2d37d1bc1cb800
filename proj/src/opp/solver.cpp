#include "auv/opp/solver.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ostream>

namespace auv::opp {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::DE: return "DE";
    case Algorithm::FA: return "FA";
    case Algorithm::BBO: return "BBO";
    case Algorithm::PSO: return "PSO";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string up(name);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "DE") return Algorithm::DE;
  if (up == "FA") return Algorithm::FA;
  if (up == "BBO") return Algorithm::BBO;
  if (up == "PSO") return Algorithm::PSO;
  throw InvalidInput("unknown path algorithm '" + std::string(name) + "'");
}

void OppConfig::validate() const {
  if (interior_points < 1) throw InvalidInput("need at least one interior control point");
  if (population < 4) throw InvalidInput("path population must be >= 4");
  if (iterations < 1) throw InvalidInput("path iterations must be >= 1");
  if (samples != 0 && samples < 2 * interior_points) throw InvalidInput("samples must be >= 2n");
  for (double w : {weights.z_min, weights.z_max, weights.surge, weights.sway, weights.yaw_rate, weights.collision,
                   weights.collision_extent}) {
    if (!(w >= 0.0)) throw InvalidInput("violation weights must be >= 0");
  }
  if (!(penalty_q >= 0.0)) throw InvalidInput("penalty scale must be >= 0");
  if (!(warm_fraction >= 0.0 && warm_fraction <= 1.0)) throw InvalidInput("warm fraction must be in [0, 1]");
  if (!(fa.damping > 0.0 && fa.damping < 1.0)) throw InvalidInput("FA damping must be in (0, 1)");
  limits.validate();
}

Corridor make_corridor(const Vec3& start, const Vec3& goal, int interior_points, const OppConfig& cfg,
                       const env::TerrainGrid& grid) {
  const double margin = cfg.corridor_margin * (goal - start).norm();
  Vec3 lo = start.cwiseMin(goal).array() - margin;
  Vec3 hi = start.cwiseMax(goal).array() + margin;
  const Vec3 floor(0.0, 0.0, cfg.limits.z_min_m);
  const Vec3 ceil(grid.width_m(), grid.height_m(), std::min(cfg.limits.z_max_m, grid.depth_m()));
  lo = lo.cwiseMax(floor).cwiseMin(ceil);
  hi = hi.cwiseMax(floor).cwiseMin(ceil);
  Corridor c;
  c.lower.resize(3 * interior_points);
  c.upper.resize(3 * interior_points);
  for (int i = 0; i < interior_points; ++i) {
    c.lower.segment<3>(3 * i) = lo;
    c.upper.segment<3>(3 * i) = hi;
  }
  return c;
}

VecX straight_genome(const Vec3& start, const Vec3& goal, int interior_points) {
  VecX x(3 * interior_points);
  for (int i = 0; i < interior_points; ++i) {
    const double s = static_cast<double>(i + 1) / (interior_points + 1);
    x.segment<3>(3 * i) = start + s * (goal - start);
  }
  return x;
}

std::vector<Vec3> assemble_polygon(const Vec3& start, const Vec3& goal, const VecX& genome) {
  std::vector<Vec3> poly;
  poly.reserve(static_cast<std::size_t>(genome.size() / 3 + 2));
  poly.push_back(start);
  for (Eigen::Index i = 0; i + 2 < genome.size(); i += 3) poly.push_back(genome.segment<3>(i));
  poly.push_back(goal);
  return poly;
}

PathProblem::PathProblem(const Vec3& start, const Vec3& goal, const Environment& env, const OppConfig& cfg)
    : start_(start), goal_(goal), env_(env), cfg_(&cfg) {
  if (!env_.terrain) throw InvalidInput("path planning needs a terrain grid");
  if (!env_.current) env_.current = std::make_shared<const env::CurrentField>();
  if (!env_.obstacles) env_.obstacles = std::make_shared<const std::vector<env::Obstacle>>();
  const double dist = (goal - start).norm();
  if (dist < 1e-9) throw InvalidInput("leg start and goal coincide");
  corridor_ = make_corridor(start, goal, cfg.interior_points, cfg, *env_.terrain);
  reference_time_ = dist / cfg.limits.cruise_mps;
}

PathCandidate PathProblem::evaluate(const VecX& genome) const {
  ++evaluations_;
  const auto poly = assemble_polygon(start_, goal_, genome);
  PathCandidate pc = spline_path(poly, cfg_->sample_count(), cfg_->limits, *env_.current, cfg_->time_mode);
  pc.violations = path_violations(pc, *env_.terrain, *env_.obstacles, cfg_->limits, env_.clock_s);
  pc.cost = path_cost(pc, pc.violations, cfg_->weights, cfg_->penalty_q, reference_time_);
  return pc;
}

void write_convergence_csv(const std::vector<OppIteration>& log, std::ostream& out) {
  out << "iteration,best_cost,violation_total\n";
  char buf[128];
  for (const auto& it : log) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g\n", it.iteration, it.best_cost, it.violation_total);
    out << buf;
  }
}

namespace {

struct Member {
  VecX x;
  PathCandidate path;
  double cost() const { return path.cost; }
};

class Best {
 public:
  Best(const OppConfig& cfg) : cfg_(cfg) {}
  void offer(const Member& m) {
    if (!have_ || m.cost() < best_.cost()) {
      best_ = m;
      have_ = true;
    }
  }
  void log(int t) {
    log_.push_back({t, best_.cost(), cfg_.penalty_q * best_.path.violations.weighted_total(cfg_.weights)});
  }
  const Member& get() const { return best_; }
  std::vector<OppIteration>& entries() { return log_; }

 private:
  const OppConfig& cfg_;
  Member best_;
  bool have_ = false;
  std::vector<OppIteration> log_;
};

VecX uniform_in(const Corridor& c, Rng& rng) {
  VecX x(c.lower.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    x[j] = c.lower[j] < c.upper[j] ? std::uniform_real_distribution<double>(c.lower[j], c.upper[j])(rng)
                                   : c.lower[j];
  }
  return x;
}

std::vector<Member> initial_population(const PathProblem& prob, const OppConfig& cfg, const Vec3& start,
                                       const Vec3& goal, const std::optional<VecX>& warm, Rng& rng) {
  const Corridor& c = prob.corridor();
  const VecX width = c.width();
  std::vector<VecX> xs;
  const bool use_warm = warm && warm->size() == prob.dimension();
  if (use_warm) {
    const int warm_count = std::max(1, static_cast<int>(std::lround(cfg.warm_fraction * cfg.population)));
    xs.push_back(c.clamp(*warm));
    std::normal_distribution<double> n01(0.0, 1.0);
    while (static_cast<int>(xs.size()) < warm_count) {
      VecX x = *warm;
      for (Eigen::Index j = 0; j < x.size(); ++j) x[j] += cfg.warm_jitter * width[j] * n01(rng);
      xs.push_back(c.clamp(x));
    }
  }
  if (cfg.seed_straight && static_cast<int>(xs.size()) < cfg.population) xs.push_back(c.clamp(straight_genome(start, goal, cfg.interior_points)));
  while (static_cast<int>(xs.size()) < cfg.population) xs.push_back(uniform_in(c, rng));
  std::vector<Member> pop;
  pop.reserve(xs.size());
  for (auto& x : xs) pop.push_back({x, prob.evaluate(x)});
  return pop;
}

void run_de(const PathProblem& prob, const OppConfig& cfg, std::vector<Member>& pop, Rng& rng, Best& best) {
  const Corridor& c = prob.corridor();
  for (int t = 1; t <= cfg.iterations; ++t) {
    std::vector<VecX> xs;
    xs.reserve(pop.size());
    for (const auto& m : pop) xs.push_back(m.x);
    std::vector<Member> next = pop;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      VecX mutant = de_mutate(xs, i, cfg.de, rng);
      VecX trial = c.clamp(de_crossover(xs[i], mutant, cfg.de.crossover, rng));
      PathCandidate pc = prob.evaluate(trial);
      if (de_trial_wins(pop[i].cost(), pc.cost)) next[i] = {std::move(trial), std::move(pc)};
      best.offer(next[i]);
    }
    pop = std::move(next);
    best.log(t);
  }
}

void run_fa(const PathProblem& prob, const OppConfig& cfg, std::vector<Member>& pop, Rng& rng, Best& best) {
  const Corridor& c = prob.corridor();
  const VecX width = c.width();
  VecX inv_width(width.size());
  for (Eigen::Index j = 0; j < width.size(); ++j) inv_width[j] = width[j] > 0.0 ? 1.0 / width[j] : 0.0;
  const double norm = std::sqrt(static_cast<double>(width.size()));
  std::uniform_real_distribution<double> half(-0.5, 0.5);
  auto zeta = [&] {
    VecX z(width.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = half(rng) * width[j];
    return z;
  };
  for (int t = 1; t <= cfg.iterations; ++t) {
    const double alpha = fa_alpha(cfg.fa, t);
    const std::vector<Member> snap = pop;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      VecX x = snap[i].x;
      bool moved = false;
      for (std::size_t j = 0; j < snap.size(); ++j) {
        if (!(snap[j].cost() < snap[i].cost())) continue;
        const double dist = (x - snap[j].x).cwiseProduct(inv_width).norm() / norm;
        x = c.clamp(fa_move(x, snap[j].x, cfg.fa.beta0, cfg.fa.absorption, dist, alpha, zeta()));
        moved = true;
      }
      if (!moved) x = c.clamp(x + alpha * zeta());  // brightest firefly walks randomly
      pop[i] = {x, prob.evaluate(x)};
      best.offer(pop[i]);
    }
    best.log(t);
  }
}

void run_bbo(const PathProblem& prob, const OppConfig& cfg, std::vector<Member>& pop, Rng& rng, Best& best) {
  const Corridor& c = prob.corridor();
  const int n = static_cast<int>(pop.size());
  const auto dim = static_cast<std::size_t>(prob.dimension());
  const auto species_p = tamp::bbo_species_probabilities(n - 1, cfg.bbo.immigration, cfg.bbo.emigration);
  const double p_max = *std::max_element(species_p.begin(), species_p.end());
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_dim(0, dim - 1);
  auto by_cost = [](const Member& a, const Member& b) { return a.cost() < b.cost(); };
  for (int t = 1; t <= cfg.iterations; ++t) {
    std::stable_sort(pop.begin(), pop.end(), by_cost);
    std::vector<double> lambda(pop.size()), mu(pop.size()), m(pop.size());
    for (int i = 0; i < n; ++i) {
      const int species = n - 1 - i;
      auto [l, e] = tamp::bbo_rates(species, n - 1, cfg.bbo.immigration, cfg.bbo.emigration);
      lambda[static_cast<std::size_t>(i)] = l;
      mu[static_cast<std::size_t>(i)] = e;
      m[static_cast<std::size_t>(i)] =
          tamp::bbo_mutation_rate(species_p[static_cast<std::size_t>(species)], p_max, cfg.bbo.mutation_max);
    }
    std::vector<Member> next;
    next.reserve(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      VecX x = pop[i].x;
      if (u01(rng) < lambda[i]) {
        for (std::size_t rep = 0; rep < dim; ++rep) {
          const auto j = tamp::roulette(mu, rng);
          if (u01(rng) < mu[j]) {
            const auto d = static_cast<Eigen::Index>(pick_dim(rng));
            x[d] = pop[j].x[d];
          }
        }
      }
      for (Eigen::Index d = 0; d < x.size(); ++d) {
        if (u01(rng) < m[i] && c.lower[d] < c.upper[d]) {
          x[d] = std::uniform_real_distribution<double>(c.lower[d], c.upper[d])(rng);
        }
      }
      next.push_back({x, prob.evaluate(x)});
    }
    std::stable_sort(next.begin(), next.end(), by_cost);
    const int elites = std::clamp(cfg.bbo.elites, 0, n);
    for (int e = 0; e < elites; ++e) {
      auto& slot = next[static_cast<std::size_t>(n - 1 - e)];
      if (pop[static_cast<std::size_t>(e)].cost() < slot.cost()) slot = pop[static_cast<std::size_t>(e)];
    }
    pop = std::move(next);
    for (const auto& mbr : pop) best.offer(mbr);
    best.log(t);
  }
}

void run_pso(const PathProblem& prob, const OppConfig& cfg, std::vector<Member>& pop, Rng& rng, Best& best) {
  const Corridor& c = prob.corridor();
  const VecX limit = cfg.pso_velocity_fraction * c.width();
  std::vector<VecX> vel;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    VecX v(limit.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      v[j] = limit[j] > 0.0 ? std::uniform_real_distribution<double>(-limit[j], limit[j])(rng) : 0.0;
    }
    vel.push_back(v);
  }
  std::vector<Member> pbest = pop;
  auto best_index = [&] {
    std::size_t g = 0;
    for (std::size_t i = 1; i < pbest.size(); ++i) {
      if (pbest[i].cost() < pbest[g].cost()) g = i;
    }
    return g;
  };
  std::size_t g = best_index();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int t = 1; t <= cfg.iterations; ++t) {
    const VecX gbest = pbest[g].x;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      VecX x = pop[i].x;
      VecX r1(x.size()), r2(x.size());
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        r1[j] = u01(rng);
        r2[j] = u01(rng);
      }
      tamp::pso_update(cfg.pso, x, vel[i], pbest[i].x, gbest, r1, r2, limit);
      x = c.clamp(x);
      pop[i] = {x, prob.evaluate(x)};
      if (pop[i].cost() < pbest[i].cost()) pbest[i] = pop[i];
      best.offer(pop[i]);
    }
    g = best_index();
    best.log(t);
  }
}

}  // namespace

OppResult solve_opp(const Vec3& start, const Vec3& goal, const Environment& env, const OppConfig& cfg,
                    const std::optional<VecX>& warm_start) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  PathProblem prob(start, goal, env, cfg);
  Rng rng(cfg.seed);
  auto pop = initial_population(prob, cfg, start, goal, warm_start, rng);
  Best best(cfg);
  for (const auto& m : pop) best.offer(m);
  switch (cfg.algorithm) {
    case Algorithm::DE: run_de(prob, cfg, pop, rng, best); break;
    case Algorithm::FA: run_fa(prob, cfg, pop, rng, best); break;
    case Algorithm::BBO: run_bbo(prob, cfg, pop, rng, best); break;
    case Algorithm::PSO: run_pso(prob, cfg, pop, rng, best); break;
  }
  OppResult res;
  res.path = best.get().path;
  res.genome = best.get().x;
  res.violated = res.path.violations.any();
  res.evaluations = prob.evaluations();
  res.log = std::move(best.entries());
  res.compute_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace auv::opp
