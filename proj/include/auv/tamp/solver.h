#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include "auv/tamp/operators.h"
#include "auv/tamp/route_eval.h"

namespace auv::tamp {

enum class Algorithm { ACO, BBO, GA, PSO };

const char* to_string(Algorithm a);
// Case-insensitive; throws InvalidInput for unknown names.
Algorithm parse_algorithm(std::string_view name);

struct TampConfig {
  Algorithm algorithm = Algorithm::GA;
  int population = 30;   // i_max
  int iterations = 100;  // t_max
  double time_threshold_s = 3.42e4;
  CostCoefficients coefficients;
  AcoParams aco;
  BboParams bbo;
  GaParams ga;
  PsoParams pso;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TampIteration {
  int iteration = 0;
  double best_cost = kInf;
  double best_time_s = 0.0;
  double best_weight = 0.0;
};

struct TampResult {
  bool found = false;
  graph::Route route;
  RouteEvaluation eval;
  double compute_seconds = 0.0;
  long evaluations = 0;
  std::vector<TampIteration> log;
};

// Runs the configured metaheuristic. The encoded minimum-time route is part
// of every initial population, so `found` is false only when no route meets
// the threshold at all.
TampResult solve_tamp(const graph::MissionGraph& g, const TampConfig& cfg);

// One GA generation: roulette parents on 1/C, uniform crossover, mutation of
// the free genes, then the best `population` distinct routes of parents and
// offspring survive.
std::vector<Individual> ga_step(const GaParams& params, const RouteProblem& problem,
                                std::vector<Individual> population, Rng& rng);

// iteration,best_cost,best_time_s,best_weight
void write_iteration_csv(const std::vector<TampIteration>& log, std::ostream& out);

}  // namespace auv::tamp
