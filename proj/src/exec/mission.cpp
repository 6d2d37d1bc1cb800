#include "auv/exec/mission.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "auv/graph/route.h"

namespace auv::exec {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

int Mission::snapshot_at(double clock_s) const {
  int active = 0;
  for (const auto& sw : schedule) {
    if (sw.time_s <= clock_s) active = sw.snapshot;
  }
  return active;
}

void Mission::validate() const {
  if (!terrain) throw InvalidInput("mission has no terrain");
  if (!obstacles) throw InvalidInput("mission has no obstacle list");
  if (currents.empty()) throw InvalidInput("mission needs at least one current snapshot");
  for (const auto& c : currents) {
    if (!c) throw InvalidInput("null current snapshot");
  }
  double last = -kInf;
  for (const auto& sw : schedule) {
    if (!(sw.time_s >= last)) throw InvalidInput("snapshot schedule must be sorted by time");
    if (sw.snapshot < 0 || sw.snapshot >= static_cast<int>(currents.size())) {
      throw InvalidInput("snapshot schedule refers to a missing snapshot");
    }
    last = sw.time_s;
  }
  if (!(total_time_s > 0.0 && std::isfinite(total_time_s))) throw InvalidInput("T_Total must be positive");
  if (!(time_threshold_s > 0.0)) throw InvalidInput("time threshold must be positive");
  if (graph.start() == graph.destination()) throw InvalidInput("start and destination coincide");
  for (const auto& o : *obstacles) o.validate();
}

const char* to_string(Mode m) { return m == Mode::Sequential ? "sequential" : "concurrent"; }
const char* to_string(Accounting a) { return a == Accounting::WallClock ? "wallclock" : "deterministic"; }
const char* to_string(CostForm f) { return f == CostForm::RealizedTime ? "realized-time" : "path-cost-sum"; }

Mode parse_mode(const std::string& s) {
  auto l = lower(s);
  if (l == "sequential") return Mode::Sequential;
  if (l == "concurrent") return Mode::Concurrent;
  throw InvalidInput("unknown mode: " + s);
}

Accounting parse_accounting(const std::string& s) {
  auto l = lower(s);
  if (l == "wallclock" || l == "wall-clock") return Accounting::WallClock;
  if (l == "deterministic") return Accounting::Deterministic;
  throw InvalidInput("unknown cost accounting: " + s);
}

CostForm parse_cost_form(const std::string& s) {
  auto l = lower(s);
  if (l == "realized-time") return CostForm::RealizedTime;
  if (l == "path-cost-sum") return CostForm::PathCostSum;
  throw InvalidInput("unknown cost form: " + s);
}

void ExecConfig::validate() const {
  tamp.validate();
  opp.validate();
  if (!(phi1 >= 0.0 && phi2 >= 0.0)) throw InvalidInput("cost coefficients must be non-negative");
  if (!(fixed_compute_s >= 0.0)) throw InvalidInput("fixed compute cost must be non-negative");
  if (!(replan_tolerance >= 0.0)) throw InvalidInput("replan tolerance must be non-negative");
  if (!(budget_reserve >= 0.0 && budget_reserve < 1.0)) throw InvalidInput("budget reserve must be in [0, 1)");
}

const char* to_string(EventType e) {
  switch (e) {
    case EventType::PlanStart: return "plan-start";
    case EventType::PlanEnd: return "plan-end";
    case EventType::LegStart: return "leg-start";
    case EventType::LegEnd: return "leg-end";
    case EventType::ReplanTrigger: return "replan-trigger";
    case EventType::SnapshotSwitch: return "snapshot-switch";
  }
  return "?";
}

double MissionReport::conservation_error() const {
  return std::abs(leg_time_s + compute_time_s + residual_s - total_time_s);
}

bool replan_trigger(double expected_s, double realized_s, double tolerance) {
  if (!(expected_s >= 0.0 && realized_s >= 0.0)) throw InvalidInput("leg times must be non-negative");
  return realized_s > (1.0 + tolerance) * expected_s;
}

double mission_cost(double sum_cost, double budget_s, double total_weight, double compute_s, double phi1,
                    double phi2) {
  if (!(total_weight > 0.0)) throw InvalidInput("total weight must be positive");
  return phi1 * std::abs(sum_cost - budget_s) + phi2 / total_weight + compute_s;
}

namespace {

struct LegPlan {
  int from = -1;
  int to = -1;
  int snapshot = 0;
  opp::OppResult result;
};

class Executive {
 public:
  Executive(const Mission& m, const ExecConfig& cfg) : m_(m), cfg_(cfg) {
    rep_.phi1 = cfg.phi1;
    rep_.phi2 = cfg.phi2;
    rep_.cost_form = cfg.cost_form;
    rep_.total_time_s = m.total_time_s;
    rep_.mission_budget_s = m.mission_budget_s();
  }

  MissionReport run();

 private:
  void emit(Event e) {
    e.clock_s = clock_;
    rep_.events.push_back(std::move(e));
  }

  void charge(double seconds) {
    rep_.compute_log.push_back(seconds);
    rep_.compute_time_s += seconds;
    clock_ += seconds;
  }

  void advance_snapshot() {
    const int s = m_.snapshot_at(clock_);
    if (s != snapshot_) {
      snapshot_ = s;
      Event e;
      e.type = EventType::SnapshotSwitch;
      e.snapshot = s;
      emit(e);
    }
  }

  double tamp_budget() const { return (m_.mission_budget_s() - clock_) * (1.0 - cfg_.budget_reserve); }

  // Runs TAMP from `at` over the unvisited part of the graph; falls back to
  // the fastest route if no route fits. Returns false on a dead end.
  bool plan_route(int at, const std::string& reason);

  std::function<LegPlan()> make_leg_job(int from, int to, int snapshot, double clock,
                                        std::optional<VecX> warm);
  void integrate_plan(const LegPlan& plan);

  double remaining_expected() const {
    double t = 0.0;
    for (std::size_t i = pos_; i + 1 < route_.size(); ++i) {
      t += m_.graph.find_edge(route_[i], route_[i + 1])->time_s;
    }
    return t;
  }

  const Mission& m_;
  const ExecConfig& cfg_;
  MissionReport rep_;
  double clock_ = 0.0;
  int snapshot_ = 0;
  graph::Route route_;
  std::size_t pos_ = 0;  // index of the current vertex in route_
  std::vector<int> visited_;
  std::vector<int> completed_;
  int opp_counter_ = 0;
};

bool Executive::plan_route(int at, const std::string& reason) {
  std::vector<int> removed;
  for (int v : visited_) {
    if (v != at) removed.push_back(v);
  }
  graph::MissionGraph g = m_.graph.restricted(at, removed, completed_);
  const double budget = tamp_budget();
  rep_.budgets.push_back(budget);

  Event start;

  start.type = EventType::PlanStart;
  start.planner = "tamp";
  start.from = at;
  start.value = budget;
  start.detail = reason;
  emit(start);

  std::optional<graph::Route> route;
  double compute = 0.0;
  if (budget > 0.0) {
    tamp::TampConfig tc = cfg_.tamp;
    tc.time_threshold_s = budget;
    tc.seed = derive_seed(cfg_.seed, {1, static_cast<std::uint64_t>(rep_.tamp_calls)});
    auto res = tamp::solve_tamp(g, tc);
    ++rep_.tamp_calls;
    rep_.tamp_evaluations += res.evaluations;
    rep_.tamp_logs.push_back(res.log);
    compute = cfg_.accounting == Accounting::Deterministic ? cfg_.fixed_compute_s : res.compute_seconds;
    if (res.found) route = res.route;
  }
  charge(compute);
  Event end;
  end.type = EventType::PlanEnd;
  end.planner = "tamp";
  end.from = at;
  end.value = compute;
  if (!route) {
    route = graph::min_time_route(g);
    if (route) {
      rep_.fallback_route = true;
      end.detail = "fallback-min-time";
    } else {
      end.detail = "dead-end";
    }
  }
  emit(end);
  if (!route) return false;
  route_ = *route;
  rep_.routes.push_back(route_);
  pos_ = 0;
  return true;
}

std::function<LegPlan()> Executive::make_leg_job(int from, int to, int snapshot, double clock,
                                                 std::optional<VecX> warm) {
  opp::Environment env;
  env.terrain = m_.terrain;
  env.current = m_.currents[static_cast<std::size_t>(snapshot)];
  env.obstacles = m_.obstacles;
  env.clock_s = clock;
  env.snapshot_id = snapshot;
  opp::OppConfig oc = cfg_.opp;
  oc.seed = derive_seed(cfg_.seed, {2, static_cast<std::uint64_t>(opp_counter_++)});
  const Vec3 a = m_.graph.waypoint(from), b = m_.graph.waypoint(to);
  return [=]() {
    LegPlan p;
    p.from = from;
    p.to = to;
    p.snapshot = snapshot;
    p.result = opp::solve_opp(a, b, env, oc, warm);
    return p;
  };
}

void Executive::integrate_plan(const LegPlan& plan) {
  ++rep_.opp_calls;
  rep_.opp_evaluations += plan.result.evaluations;
  const double compute =
      cfg_.accounting == Accounting::Deterministic ? cfg_.fixed_compute_s : plan.result.compute_seconds;
  charge(compute);
  Event e;
  e.type = EventType::PlanEnd;
  e.planner = "opp";
  e.from = plan.from;
  e.to = plan.to;
  e.value = compute;
  e.snapshot = plan.snapshot;
  emit(e);
}

MissionReport Executive::run() {
  const int dest = m_.graph.destination();
  int at = m_.graph.start();
  visited_.push_back(at);

  if (!plan_route(at, "initial")) {
    rep_.failure = "destination unreachable";
  } else {
    rep_.initial_route = route_;
  }

  std::optional<LegPlan> next;  // lookahead for the leg starting at `at`
  while (rep_.failure.empty() && at != dest) {
    if (clock_ >= m_.total_time_s) {
      rep_.failure = "budget exhausted";
      break;
    }
    advance_snapshot();
    const int to = route_[pos_ + 1];

    // Plan for this leg: reuse the lookahead when it matches the route and the
    // current map has not changed since it was dispatched.
    LegPlan plan;
    if (next && next->from == at && next->to == to && next->snapshot == snapshot_) {
      plan = std::move(*next);
    } else {
      std::optional<VecX> warm;
      if (next && next->from == at && next->to == to) warm = next->result.genome;
      Event s;
      s.type = EventType::PlanStart;
      s.planner = "opp";
      s.from = at;
      s.to = to;
      s.snapshot = snapshot_;
      emit(s);
      plan = make_leg_job(at, to, snapshot_, clock_, warm)();
      integrate_plan(plan);
      advance_snapshot();
    }
    next.reset();

    // Dispatch the lookahead for the following leg before flying this one.
    std::future<LegPlan> pending;
    std::optional<LegPlan> ready;
    bool have_lookahead = false;
    if (pos_ + 2 < route_.size()) {
      const int after = route_[pos_ + 2];
      Event s;
      s.type = EventType::PlanStart;
      s.planner = "opp";
      s.from = to;
      s.to = after;
      s.snapshot = snapshot_;
      s.detail = "lookahead";
      emit(s);
      auto job = make_leg_job(to, after, snapshot_, clock_ + plan.result.path.time_s, std::nullopt);
      if (cfg_.mode == Mode::Concurrent) {
        pending = std::async(std::launch::async, std::move(job));
      } else {
        ready = job();
      }
      have_lookahead = true;
    }

    // Fly the leg under the map active at departure.
    const graph::Edge& edge = *m_.graph.find_edge(at, to);
    LegRecord leg;
    leg.from = at;
    leg.to = to;
    leg.task = edge.task;
    leg.weight = edge.weight;
    leg.expected_s = edge.time_s;
    leg.planned_s = plan.result.path.time_s;
    leg.departure_s = clock_;
    leg.snapshot = snapshot_;
    const auto& field = *m_.currents[static_cast<std::size_t>(snapshot_)];
    leg.path = opp::spline_path(plan.result.path.control, cfg_.opp.sample_count(), cfg_.opp.limits, field,
                                cfg_.opp.time_mode);
    const auto v = opp::path_violations(leg.path, *m_.terrain, *m_.obstacles, cfg_.opp.limits, clock_);
    const double ref = (m_.graph.waypoint(to) - m_.graph.waypoint(at)).norm() / cfg_.opp.limits.cruise_mps;
    leg.path.violations = v;
    leg.path_cost = opp::path_cost(leg.path, v, cfg_.opp.weights, cfg_.opp.penalty_q, ref);
    leg.path.cost = leg.path_cost;
    leg.violation = cfg_.opp.penalty_q * v.weighted_total(cfg_.opp.weights);
    leg.violated = v.any();
    leg.realized_s = leg.path.time_s;
    leg.convergence = plan.result.log;

    Event ls;

    ls.type = EventType::LegStart;
    ls.from = at;
    ls.to = to;
    ls.expected = leg.expected_s;
    ls.value = leg.planned_s;
    ls.snapshot = snapshot_;
    emit(ls);
    clock_ += leg.realized_s;
    rep_.leg_time_s += leg.realized_s;
    rep_.path_cost_sum += leg.path_cost;
    rep_.total_weight += leg.weight;
    if (leg.task != graph::kNoTask) {
      completed_.push_back(leg.task);
      ++rep_.completed_tasks;
    }
    if (leg.violated) ++rep_.violated_legs;
    rep_.violation_total += leg.violation;
    Event le;
    le.type = EventType::LegEnd;
    le.from = at;
    le.to = to;
    le.expected = leg.expected_s;
    le.value = leg.realized_s;
    le.snapshot = snapshot_;
    emit(le);
    rep_.legs.push_back(std::move(leg));
    const LegRecord& flown = rep_.legs.back();

    at = to;
    ++pos_;
    visited_.push_back(at);
    advance_snapshot();

    // Re-plan check at the waypoint. The TAMP budget is fixed before the
    // lookahead is integrated so both modes see the same inputs.
    if (at != dest) {
      std::string why;
      if (replan_trigger(flown.expected_s, flown.realized_s, cfg_.replan_tolerance)) {
        why = "drift";
      } else if (clock_ + remaining_expected() >= m_.mission_budget_s()) {
        why = "budget";
      }
      if (!why.empty()) {
        Event t;
        t.type = EventType::ReplanTrigger;
        t.from = flown.from;
        t.to = flown.to;
        t.expected = flown.expected_s;
        t.value = flown.realized_s;
        t.detail = why;
        emit(t);
        ++rep_.replans;
        if (!plan_route(at, why)) rep_.failure = "destination unreachable";
      }
    }

    if (have_lookahead) {
      LegPlan la = cfg_.mode == Mode::Concurrent ? pending.get() : std::move(*ready);
      integrate_plan(la);
      advance_snapshot();
      next = std::move(la);
    }
  }

  if (rep_.failure.empty() && at == dest) rep_.success = true;
  rep_.visited = visited_;
  rep_.elapsed_s = clock_;
  rep_.residual_s = m_.total_time_s - clock_;

  const double sum = cfg_.cost_form == CostForm::RealizedTime ? rep_.leg_time_s : rep_.path_cost_sum;
  // No leg flown means no weight collected; the objective term is charged as
  // if a single unit of weight had been obtained so C_M stays finite.
  const double weight = rep_.legs.empty() ? 1.0 : rep_.total_weight;
  rep_.cost = mission_cost(sum, m_.mission_budget_s(), weight, rep_.compute_time_s, cfg_.phi1, cfg_.phi2);
  return rep_;
}

json event_json(const Event& e) {
  json j;
  j["event"] = to_string(e.type);
  j["clock_s"] = e.clock_s;
  if (!e.planner.empty()) j["planner"] = e.planner;
  if (e.from >= 0) j["from"] = e.from;
  if (e.to >= 0) j["to"] = e.to;
  switch (e.type) {
    case EventType::PlanStart:
      if (e.planner == "tamp") j["budget_s"] = e.value;
      break;
    case EventType::PlanEnd: j["compute_s"] = e.value; break;
    case EventType::LegStart:
      j["expected_s"] = e.expected;
      j["planned_s"] = e.value;
      break;
    case EventType::LegEnd:
    case EventType::ReplanTrigger:
      j["expected_s"] = e.expected;
      j["realized_s"] = e.value;
      break;
    case EventType::SnapshotSwitch: break;
  }
  if (e.snapshot >= 0) j["snapshot"] = e.snapshot;
  if (!e.detail.empty()) j["detail"] = e.detail;
  return j;
}

}  // namespace

MissionReport run_mission(const Mission& mission, const ExecConfig& cfg) {
  mission.validate();
  cfg.validate();
  Executive ex(mission, cfg);
  return ex.run();
}

void write_transcript(const MissionReport& report, std::ostream& out) {
  for (const auto& e : report.events) out << event_json(e).dump() << '\n';
}

void write_report_json(const MissionReport& r, std::ostream& out) {
  json j;
  j["success"] = r.success;
  j["failure"] = r.failure;
  j["fallback_route"] = r.fallback_route;
  j["cost"] = r.cost;
  j["phi1"] = r.phi1;
  j["phi2"] = r.phi2;
  j["cost_form"] = to_string(r.cost_form);
  j["total_time_s"] = r.total_time_s;
  j["mission_budget_s"] = r.mission_budget_s;
  j["total_weight"] = r.total_weight;
  j["completed_tasks"] = r.completed_tasks;
  j["leg_time_s"] = r.leg_time_s;
  j["compute_time_s"] = r.compute_time_s;
  j["residual_s"] = r.residual_s;
  j["replans"] = r.replans;
  j["tamp_calls"] = r.tamp_calls;
  j["opp_calls"] = r.opp_calls;
  j["tamp_evaluations"] = r.tamp_evaluations;
  j["opp_evaluations"] = r.opp_evaluations;
  j["violated_legs"] = r.violated_legs;
  j["violation_total"] = r.violation_total;
  j["initial_route"] = r.initial_route;
  j["routes"] = r.routes;
  j["budgets"] = r.budgets;
  j["visited"] = r.visited;
  json legs = json::array();
  for (const auto& l : r.legs) {
    legs.push_back({{"from", l.from},
                    {"to", l.to},
                    {"task", l.task},
                    {"weight", l.weight},
                    {"expected_s", l.expected_s},
                    {"planned_s", l.planned_s},
                    {"realized_s", l.realized_s},
                    {"path_cost", l.path_cost},
                    {"violation", l.violation}});
  }
  j["legs"] = legs;
  out << j.dump(2) << '\n';
}

void write_legs_csv(const MissionReport& r, std::ostream& out) {
  out << "leg,from,to,task,weight,departure_s,expected_s,planned_s,realized_s,arc_length_m,path_cost,violation,"
         "snapshot\n";
  char buf[512];
  for (std::size_t i = 0; i < r.legs.size(); ++i) {
    const auto& l = r.legs[i];
    std::snprintf(buf, sizeof buf, "%zu,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", i, l.from,
                  l.to, l.task, l.weight, l.departure_s, l.expected_s, l.planned_s, l.realized_s,
                  l.path.arc_length_m, l.path_cost, l.violation, l.snapshot);
    out << buf;
  }
}

}  // namespace auv::exec
