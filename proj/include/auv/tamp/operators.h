#pragma once

#include <span>
#include <utility>
#include <vector>

#include "auv/graph/graph.h"

namespace auv::tamp {

class DeadEnd : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- ant colony ------------------------------------------------------------

struct AcoParams {
  double alpha = 1.0;
  double beta = 1.0;
  double evaporation = 0.1;  // rho
  double deposit = 1.0;      // Q
  double exponent_decay = 0.99;
  bool decay_exponents = true;
  double trail_floor = 1e-12;
  double initial_trail = 1.0;
};

// p_j = tau_j^a eta_j^b / sum_l tau_l^a eta_l^b over the neighborhood given
// by the two rows. Throws DeadEnd for an empty neighborhood.
std::vector<double> aco_transition_prob(double alpha, double beta, std::span<const double> tau,
                                        std::span<const double> eta);
inline std::vector<double> aco_transition_prob(const AcoParams& p, std::span<const double> tau,
                                               std::span<const double> eta) {
  return aco_transition_prob(p.alpha, p.beta, tau, eta);
}

// Evaporates every trail and deposits Q / best_cost on the edges of
// best_route. trails is indexed by edge id.
void aco_update_pheromone(const AcoParams& p, std::vector<double>& trails, const graph::MissionGraph& g,
                          std::span<const int> best_route, double best_cost);

// ---- biogeography ----------------------------------------------------------

struct BboParams {
  double immigration = 1.0;  // I
  double emigration = 1.0;   // E
  double mutation_max = 0.1; // m_max
  int elites = 2;
};

// (lambda_S, mu_S) for 0 <= S <= S_max.
std::pair<double, double> bbo_rates(double species, double species_max, double immigration,
                                    double emigration);

// Stationary species-count probabilities P_0..P_{S_max} of the linear
// immigration/emigration model (binomial with p = I / (I + E)).
std::vector<double> bbo_species_probabilities(int species_max, double immigration, double emigration);

// m_max (1 - P_S / P_max), clamped to [0, m_max].
double bbo_mutation_rate(double p_s, double p_max, double mutation_max);

// ---- particle swarm --------------------------------------------------------

struct PsoParams {
  double inertia = 0.7;  // omega
  double cognitive = 1.5;
  double social = 1.5;
  double velocity_min = -100.0;
  double velocity_max = 100.0;
};

// v <- w v + c1 r1 (p - x) + c2 r2 (g - x), clamped; x <- x + v.
void pso_update(const PsoParams& p, VecX& x, VecX& v, const VecX& p_best, const VecX& g_best,
                const VecX& r1, const VecX& r2);
void pso_update(const PsoParams& p, VecX& x, VecX& v, const VecX& p_best, const VecX& g_best, Rng& rng);
// Per-dimension velocity limits instead of the scalar pair.
void pso_update(const PsoParams& p, VecX& x, VecX& v, const VecX& p_best, const VecX& g_best,
                const VecX& r1, const VecX& r2, const VecX& v_limit);

// ---- genetic ---------------------------------------------------------------

struct GaParams {
  double mix_ratio = 0.5;
  double mutation_rate = 0.3;
  int stall_generations = 50;
};

// Gene j from b where mask[j], else from a.
VecX uniform_crossover(const VecX& a, const VecX& b, const std::vector<bool>& mask);
VecX uniform_crossover(const VecX& a, const VecX& b, double mix_ratio, Rng& rng);

void swap_mutation(VecX& x, int i, int j);
// Reverses the closed range [i, j].
void inversion_mutation(VecX& x, int i, int j);
// Removes gene `from` and reinserts it at position `to`.
void insertion_mutation(VecX& x, int from, int to);

// One of the three operators picked uniformly, acting only on `free_genes`.
void random_mutation(VecX& x, std::span<const int> free_genes, Rng& rng);

// Index drawn with probability proportional to weights (uniform when all are
// zero or non-finite).
std::size_t roulette(std::span<const double> weights, Rng& rng);

}  // namespace auv::tamp
