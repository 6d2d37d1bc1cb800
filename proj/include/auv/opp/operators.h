#pragma once

#include <span>
#include <vector>

#include "auv/common.h"

namespace auv::opp {

struct DeParams {
  double scale = 0.5;      // F
  double crossover = 0.9;  // r_C
  // Base vector becomes a random convex mix of the three picked members
  // instead of the third one alone.
  bool donor_mix = false;
};

struct FaParams {
  double beta0 = 1.0;
  double absorption = 5.0;  // epsilon_FA, on corridor-normalised distance
  double alpha0 = 0.2;
  double damping = 0.97;  // kappa
};

// x_r3 + F (x_r1 - x_r2).
VecX de_mutate(const VecX& x_r1, const VecX& x_r2, const VecX& x_r3, double scale);
// Picks distinct r1, r2, r3 != i. Throws InvalidInput for fewer than 4 members.
VecX de_mutate(std::span<const VecX> population, std::size_t i, const DeParams& p, Rng& rng);

// Gene j from the mutant where mask[j], else from the parent.
VecX de_crossover(const VecX& parent, const VecX& mutant, const std::vector<bool>& mask);
// mask[j] = rand_j <= r_C or j == k for one random forced index k.
VecX de_crossover(const VecX& parent, const VecX& mutant, double rate, Rng& rng);

// Trial survives only when strictly cheaper.
inline bool de_trial_wins(double parent_cost, double trial_cost) { return trial_cost < parent_cost; }
inline const VecX& de_select(const VecX& parent, const VecX& trial, double parent_cost, double trial_cost) {
  return de_trial_wins(parent_cost, trial_cost) ? trial : parent;
}

// x_i + beta0 exp(-eps L^2) (x_j - x_i) + alpha_t zeta, with zeta already
// scaled by the caller.
VecX fa_move(const VecX& x_i, const VecX& x_j, double beta0, double absorption, double distance,
             double alpha_t, const VecX& zeta);

inline double fa_alpha(const FaParams& p, int iteration) { return p.alpha0 * std::pow(p.damping, iteration); }

}  // namespace auv::opp
