#include "auv/opp/operators.h"

#include <cmath>

namespace auv::opp {

VecX de_mutate(const VecX& x_r1, const VecX& x_r2, const VecX& x_r3, double scale) {
  if (x_r1.size() != x_r2.size() || x_r1.size() != x_r3.size()) throw InvalidInput("DE dimension mismatch");
  return x_r3 + scale * (x_r1 - x_r2);
}

VecX de_mutate(std::span<const VecX> population, std::size_t i, const DeParams& p, Rng& rng) {
  const std::size_t n = population.size();
  if (n < 4) throw InvalidInput("DE needs a population of at least 4");
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t r[3];
  for (int k = 0; k < 3; ++k) {
    std::size_t c;
    do {
      c = pick(rng);
    } while (c == i || (k > 0 && c == r[0]) || (k > 1 && c == r[1]));
    r[k] = c;
  }
  const VecX& a = population[r[0]];
  const VecX& b = population[r[1]];
  const VecX& c = population[r[2]];
  if (!p.donor_mix) return de_mutate(a, b, c, p.scale);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double l1 = u(rng), l2 = u(rng), l3 = u(rng);
  const double sum = l1 + l2 + l3;
  VecX donor = (l1 * a + l2 * b + l3 * c) / sum;
  return de_mutate(a, b, donor, p.scale);
}

VecX de_crossover(const VecX& parent, const VecX& mutant, const std::vector<bool>& mask) {
  if (parent.size() != mutant.size() || static_cast<std::size_t>(parent.size()) != mask.size()) {
    throw InvalidInput("DE crossover dimension mismatch");
  }
  VecX trial = parent;
  for (Eigen::Index j = 0; j < parent.size(); ++j) {
    if (mask[static_cast<std::size_t>(j)]) trial[j] = mutant[j];
  }
  return trial;
}

VecX de_crossover(const VecX& parent, const VecX& mutant, double rate, Rng& rng) {
  const auto n = static_cast<std::size_t>(parent.size());
  if (n == 0) return parent;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const std::size_t forced = pick(rng);
  std::vector<bool> mask(n);
  for (std::size_t j = 0; j < n; ++j) mask[j] = u(rng) <= rate || j == forced;
  return de_crossover(parent, mutant, mask);
}

VecX fa_move(const VecX& x_i, const VecX& x_j, double beta0, double absorption, double distance,
             double alpha_t, const VecX& zeta) {
  if (x_i.size() != x_j.size() || x_i.size() != zeta.size()) throw InvalidInput("FA dimension mismatch");
  const double beta = std::isinf(absorption) && distance > 0.0
                          ? 0.0
                          : beta0 * std::exp(-absorption * distance * distance);
  return x_i + beta * (x_j - x_i) + alpha_t * zeta;
}

}  // namespace auv::opp
