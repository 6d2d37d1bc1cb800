#include "auv/tamp/route_eval.h"

#include <cmath>

namespace auv::tamp {

namespace {

void require_feasible(const graph::MissionGraph& g, std::span<const int> route) {
  auto f = graph::check_feasibility(g, route);
  if (f != graph::Feasibility::Feasible) {
    throw InvalidInput(std::string("infeasible route: ") + graph::to_string(f));
  }
}

}  // namespace

double route_time(const graph::MissionGraph& g, std::span<const int> route) {
  require_feasible(g, route);
  double t = 0.0;
  for (std::size_t i = 1; i < route.size(); ++i) t += g.find_edge(route[i - 1], route[i])->time_s;
  return t;
}

double route_weight(const graph::MissionGraph& g, std::span<const int> route) {
  require_feasible(g, route);
  double w = 0.0;
  for (std::size_t i = 1; i < route.size(); ++i) w += g.find_edge(route[i - 1], route[i])->weight;
  return w;
}

RouteEvaluation route_cost(const graph::MissionGraph& g, std::span<const int> route,
                           double time_threshold_s, const CostCoefficients& coef) {
  if (!(time_threshold_s > 0.0)) throw InvalidInput("time threshold must be positive");
  RouteEvaluation ev;
  ev.time_s = route_time(g, route);
  ev.total_weight = route_weight(g, route);
  const double inv_w = ev.total_weight > 0.0 ? 1.0 / ev.total_weight : kInf;
  ev.cost = coef.time * std::abs(ev.time_s - time_threshold_s) / time_threshold_s + coef.weight * inv_w;
  ev.time_violation_s = std::max(0.0, ev.time_s - time_threshold_s);
  ev.hard_violation = ev.time_s >= time_threshold_s;
  return ev;
}

RouteProblem::RouteProblem(const graph::MissionGraph& g, double time_threshold_s, CostCoefficients coef)
    : decoder_(g, time_threshold_s), threshold_(time_threshold_s), coef_(coef) {
  if (!(time_threshold_s > 0.0)) throw InvalidInput("time threshold must be positive");
}

RouteEvaluation RouteProblem::evaluate_route(std::span<const int> route) const {
  ++evaluations_;
  return route_cost(graph(), route, threshold_, coef_);
}

Individual RouteProblem::evaluate(VecX genome) const {
  Individual ind;
  ind.genome = std::move(genome);
  ind.route = decoder_.decode(std::span<const double>(ind.genome.data(), static_cast<std::size_t>(ind.genome.size())));
  if (!ind.route) {
    ++evaluations_;
  } else {
    ind.eval = evaluate_route(*ind.route);
    ind.cost = ind.eval.penalized_cost();
  }
  return ind;
}

}  // namespace auv::tamp
