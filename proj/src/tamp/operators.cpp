#include "auv/tamp/operators.h"

#include <algorithm>
#include <cmath>

namespace auv::tamp {

std::vector<double> aco_transition_prob(double alpha, double beta, std::span<const double> tau,
                                        std::span<const double> eta) {
  if (tau.empty()) throw DeadEnd("ant has no admissible neighbor");
  if (tau.size() != eta.size()) throw InvalidInput("pheromone and heuristic rows differ in length");
  std::vector<double> p(tau.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    if (!(tau[j] > 0.0) || !(eta[j] > 0.0)) throw InvalidInput("pheromone and heuristic must be positive");
    p[j] = std::pow(tau[j], alpha) * std::pow(eta[j], beta);
    sum += p[j];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    return p;
  }
  for (auto& v : p) v /= sum;
  return p;
}

void aco_update_pheromone(const AcoParams& p, std::vector<double>& trails, const graph::MissionGraph& g,
                          std::span<const int> best_route, double best_cost) {
  if (trails.size() != static_cast<std::size_t>(g.edge_count())) {
    throw InvalidInput("one trail per edge expected");
  }
  for (auto& t : trails) t *= 1.0 - p.evaporation;
  if (std::isfinite(best_cost) && best_cost > 0.0 && p.deposit != 0.0) {
    const double amount = p.deposit / best_cost;
    for (std::size_t i = 1; i < best_route.size(); ++i) {
      int e = g.edge_index(best_route[i - 1], best_route[i]);
      if (e >= 0) trails[static_cast<std::size_t>(e)] += amount;
    }
  }
  for (auto& t : trails) t = std::max(t, p.trail_floor);
}

std::pair<double, double> bbo_rates(double species, double species_max, double immigration,
                                    double emigration) {
  if (!(species_max > 0.0) || species < 0.0 || species > species_max) {
    throw InvalidInput("species count out of range");
  }
  const double frac = species / species_max;
  return {immigration * (1.0 - frac), emigration * frac};
}

std::vector<double> bbo_species_probabilities(int species_max, double immigration, double emigration) {
  if (species_max < 1) throw InvalidInput("species_max must be >= 1");
  if (!(immigration > 0.0) || !(emigration > 0.0)) throw InvalidInput("migration rates must be positive");
  // Detailed balance of the birth-death chain: P_{S+1} mu_{S+1} = P_S lambda_S.
  // Worked in log space so large S_max cannot overflow.
  const auto n = static_cast<std::size_t>(species_max);
  std::vector<double> logp(n + 1, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    double lambda = bbo_rates(static_cast<double>(s), species_max, immigration, emigration).first;
    double mu_next = bbo_rates(static_cast<double>(s + 1), species_max, immigration, emigration).second;
    logp[s + 1] = logp[s] + std::log(lambda) - std::log(mu_next);
  }
  const double top = *std::max_element(logp.begin(), logp.end());
  std::vector<double> p(n + 1);
  double sum = 0.0;
  for (std::size_t s = 0; s <= n; ++s) sum += p[s] = std::exp(logp[s] - top);
  for (auto& v : p) v /= sum;
  return p;
}

double bbo_mutation_rate(double p_s, double p_max, double mutation_max) {
  if (!(p_max > 0.0)) throw InvalidInput("P_max must be positive");
  return std::clamp(mutation_max * (1.0 - p_s / p_max), 0.0, mutation_max);
}

void pso_update(const PsoParams& p, VecX& x, VecX& v, const VecX& p_best, const VecX& g_best,
                const VecX& r1, const VecX& r2, const VecX& v_limit) {
  const auto n = x.size();
  if (v.size() != n || p_best.size() != n || g_best.size() != n || r1.size() != n || r2.size() != n ||
      v_limit.size() != n) {
    throw InvalidInput("pso_update dimension mismatch");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    double vj = p.inertia * v[j] + p.cognitive * r1[j] * (p_best[j] - x[j]) +
                p.social * r2[j] * (g_best[j] - x[j]);
    v[j] = std::clamp(vj, -v_limit[j], v_limit[j]);
    x[j] += v[j];
  }
}

void pso_update(const PsoParams& p, VecX& x, VecX& v, const VecX& p_best, const VecX& g_best,
                const VecX& r1, const VecX& r2) {
  const auto n = x.size();
  if (v.size() != n || p_best.size() != n || g_best.size() != n || r1.size() != n || r2.size() != n) {
    throw InvalidInput("pso_update dimension mismatch");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    double vj = p.inertia * v[j] + p.cognitive * r1[j] * (p_best[j] - x[j]) +
                p.social * r2[j] * (g_best[j] - x[j]);
    v[j] = std::clamp(vj, p.velocity_min, p.velocity_max);
    x[j] += v[j];
  }
}

void pso_update(const PsoParams& p, VecX& x, VecX& v, const VecX& p_best, const VecX& g_best, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  VecX r1(x.size()), r2(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    r1[j] = u(rng);
    r2[j] = u(rng);
  }
  pso_update(p, x, v, p_best, g_best, r1, r2);
}

VecX uniform_crossover(const VecX& a, const VecX& b, const std::vector<bool>& mask) {
  if (a.size() != b.size() || static_cast<std::size_t>(a.size()) != mask.size()) {
    throw InvalidInput("crossover dimension mismatch");
  }
  VecX c = a;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (mask[static_cast<std::size_t>(j)]) c[j] = b[j];
  }
  return c;
}

VecX uniform_crossover(const VecX& a, const VecX& b, double mix_ratio, Rng& rng) {
  std::bernoulli_distribution take(mix_ratio);
  std::vector<bool> mask(static_cast<std::size_t>(a.size()));
  for (std::size_t j = 0; j < mask.size(); ++j) mask[j] = take(rng);
  return uniform_crossover(a, b, mask);
}

void swap_mutation(VecX& x, int i, int j) { std::swap(x[i], x[j]); }

void inversion_mutation(VecX& x, int i, int j) {
  if (i > j) std::swap(i, j);
  std::reverse(x.data() + i, x.data() + j + 1);
}

void insertion_mutation(VecX& x, int from, int to) {
  if (from < to) {
    std::rotate(x.data() + from, x.data() + from + 1, x.data() + to + 1);
  } else if (from > to) {
    std::rotate(x.data() + to, x.data() + from, x.data() + from + 1);
  }
}

void random_mutation(VecX& x, std::span<const int> free_genes, Rng& rng) {
  const int n = static_cast<int>(free_genes.size());
  if (n < 2) return;
  VecX sub(n);
  for (int i = 0; i < n; ++i) sub[i] = x[free_genes[static_cast<std::size_t>(i)]];
  std::uniform_int_distribution<int> pos(0, n - 1), op(0, 2);
  int a = pos(rng), b = pos(rng);
  while (b == a) b = pos(rng);
  switch (op(rng)) {
    case 0: swap_mutation(sub, a, b); break;
    case 1: inversion_mutation(sub, a, b); break;
    default: insertion_mutation(sub, a, b); break;
  }
  for (int i = 0; i < n; ++i) x[free_genes[static_cast<std::size_t>(i)]] = sub[i];
}

std::size_t roulette(std::span<const double> weights, Rng& rng) {
  if (weights.empty()) throw InvalidInput("roulette over an empty set");
  double total = 0.0;
  for (double w : weights) {
    if (std::isfinite(w) && w > 0.0) total += w;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    std::uniform_int_distribution<std::size_t> pick(0, weights.size() - 1);
    return pick(rng);
  }
  double r = std::uniform_real_distribution<double>(0.0, total)(rng);
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double w = weights[i];
    if (!(std::isfinite(w) && w > 0.0)) continue;
    last = i;
    if (r < w) return i;
    r -= w;
  }
  return last;
}

}  // namespace auv::tamp
