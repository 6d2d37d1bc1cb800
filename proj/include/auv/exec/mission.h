#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "auv/env/current.h"
#include "auv/env/obstacle.h"
#include "auv/env/terrain.h"
#include "auv/graph/graph.h"
#include "auv/opp/solver.h"
#include "auv/tamp/solver.h"

namespace auv::exec {

struct SnapshotSwitch {
  double time_s = 0.0;
  int snapshot = 0;

  bool operator==(const SnapshotSwitch&) const = default;
};

// Everything the closed loop needs, already built. Snapshot 0 is active at
// mission start; `schedule` switches the current map on the mission clock.
struct Mission {
  graph::MissionGraph graph;
  std::shared_ptr<const env::TerrainGrid> terrain;
  std::vector<std::shared_ptr<const env::CurrentField>> currents;
  std::vector<SnapshotSwitch> schedule;
  std::shared_ptr<const std::vector<env::Obstacle>> obstacles;
  double total_time_s = 10800.0;
  double time_threshold_s = 3.42e4;

  // Budget the first route is planned against.
  double mission_budget_s() const { return std::min(total_time_s, time_threshold_s); }
  int snapshot_at(double clock_s) const;
  void validate() const;
};

enum class Mode { Sequential, Concurrent };
enum class Accounting { WallClock, Deterministic };
// RealizedTime sums leg times in seconds inside the mission cost; PathCostSum
// sums the dimensionless path costs.
enum class CostForm { RealizedTime, PathCostSum };

const char* to_string(Mode m);
const char* to_string(Accounting a);
const char* to_string(CostForm f);
Mode parse_mode(const std::string& s);
Accounting parse_accounting(const std::string& s);
CostForm parse_cost_form(const std::string& s);

struct ExecConfig {
  tamp::TampConfig tamp;
  opp::OppConfig opp;
  double phi1 = 1.0 / 3600.0;
  double phi2 = 1.0;
  Mode mode = Mode::Sequential;
  Accounting accounting = Accounting::WallClock;
  double fixed_compute_s = 1.0;  // per planner call in deterministic mode
  double replan_tolerance = 0.1;
  double budget_reserve = 0.05;  // fraction of the remaining budget kept back from TAMP
  CostForm cost_form = CostForm::RealizedTime;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class EventType { PlanStart, PlanEnd, LegStart, LegEnd, ReplanTrigger, SnapshotSwitch };

const char* to_string(EventType e);

struct Event {
  EventType type = EventType::PlanStart;
  double clock_s = 0.0;
  std::string planner;  // "tamp" / "opp" for plan events
  int from = -1;
  int to = -1;
  double value = 0.0;     // T_compute, realized leg time or budget
  double expected = 0.0;  // expected leg time where relevant
  int snapshot = -1;
  std::string detail;
};

struct LegRecord {
  int from = 0;
  int to = 0;
  int task = graph::kNoTask;
  double weight = 1.0;
  double expected_s = 0.0;  // graph edge time
  double planned_s = 0.0;   // path time under the planning snapshot
  double realized_s = 0.0;  // path time under the snapshot active at departure
  double departure_s = 0.0;
  int snapshot = 0;
  double path_cost = 0.0;
  double violation = 0.0;  // weighted violation total of the flown path
  bool violated = false;
  opp::PathCandidate path;
  std::vector<opp::OppIteration> convergence;
};

struct MissionReport {
  bool success = false;
  std::string failure;  // empty on success
  bool fallback_route = false;  // a min-time route replaced a TAMP no-solution

  double cost = 0.0;  // C_M
  double phi1 = 0.0;
  double phi2 = 0.0;
  CostForm cost_form = CostForm::RealizedTime;
  double total_time_s = 0.0;
  double mission_budget_s = 0.0;

  double total_weight = 0.0;
  int completed_tasks = 0;
  double leg_time_s = 0.0;      // sum of realized leg times
  double compute_time_s = 0.0;  // sum of T_compute
  double residual_s = 0.0;
  double elapsed_s = 0.0;
  double path_cost_sum = 0.0;

  int replans = 0;
  int tamp_calls = 0;
  int opp_calls = 0;
  long tamp_evaluations = 0;
  long opp_evaluations = 0;
  int violated_legs = 0;
  double violation_total = 0.0;

  graph::Route initial_route;
  std::vector<graph::Route> routes;  // every route adopted, initial first
  std::vector<double> budgets;       // TAMP budget passed per planning call
  std::vector<int> visited;
  std::vector<double> compute_log;
  std::vector<LegRecord> legs;
  std::vector<std::vector<tamp::TampIteration>> tamp_logs;
  std::vector<Event> events;

  // |legs + compute + residual - T_Total|
  double conservation_error() const;
};

// T_P > (1 + delta) * t_ij. Only slow legs trigger.
bool replan_trigger(double expected_s, double realized_s, double tolerance = 0.1);

// Phi1 * |sum_cost - budget| + Phi2 / weight + compute. Throws InvalidInput
// for a non-positive weight.
double mission_cost(double sum_cost, double budget_s, double total_weight, double compute_s,
                    double phi1, double phi2);

MissionReport run_mission(const Mission& mission, const ExecConfig& cfg);

void write_transcript(const MissionReport& report, std::ostream& out);  // JSON lines
void write_report_json(const MissionReport& report, std::ostream& out);
void write_legs_csv(const MissionReport& report, std::ostream& out);

}  // namespace auv::exec
