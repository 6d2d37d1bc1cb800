#pragma once

#include <optional>
#include <span>

#include "auv/graph/route.h"

namespace auv::tamp {

struct CostCoefficients {
  double time = 1.0;    // c_t
  double weight = 1.0;  // c_w
};

struct RouteEvaluation {
  double time_s = 0.0;
  double total_weight = 0.0;
  double cost = kInf;
  double time_violation_s = 0.0;  // max(0, T - T_tau)
  bool hard_violation = false;    // T >= T_tau

  // Death penalty: infinite once the time threshold is reached.
  double penalized_cost() const { return hard_violation ? kInf : cost; }
};

// Sum of edge times. Throws InvalidInput for an infeasible route.
double route_time(const graph::MissionGraph& g, std::span<const int> route);
double route_weight(const graph::MissionGraph& g, std::span<const int> route);

// C = c_t |T - T_tau| / T_tau + c_w / W.
RouteEvaluation route_cost(const graph::MissionGraph& g, std::span<const int> route,
                           double time_threshold_s, const CostCoefficients& coef = {});

// Decoded priority vector with its evaluation; cost is kInf when the decode
// failed or the route breaks the time threshold.
struct Individual {
  VecX genome;
  std::optional<graph::Route> route;
  RouteEvaluation eval;
  double cost = kInf;
};

// Shared decode-and-evaluate step for the population-based solvers. The
// decoder prunes continuations that cannot meet the threshold, so every
// decoded route already satisfies T < T_tau.
class RouteProblem {
 public:
  RouteProblem(const graph::MissionGraph& g, double time_threshold_s, CostCoefficients coef = {});

  Individual evaluate(VecX genome) const;
  RouteEvaluation evaluate_route(std::span<const int> route) const;

  const graph::MissionGraph& graph() const { return decoder_.graph(); }
  const graph::RouteDecoder& decoder() const { return decoder_; }
  double threshold() const { return threshold_; }
  int dimension() const { return graph().vertex_count(); }
  long evaluations() const { return evaluations_; }

 private:
  graph::RouteDecoder decoder_;
  double threshold_;
  CostCoefficients coef_;
  mutable long evaluations_ = 0;
};

}  // namespace auv::tamp
