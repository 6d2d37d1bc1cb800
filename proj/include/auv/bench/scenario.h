#pragma once

#include <optional>
#include <string>
#include <vector>

#include "auv/env/current.h"
#include "auv/env/obstacle.h"
#include "auv/env/terrain.h"
#include "auv/exec/mission.h"

namespace auv::bench {

inline constexpr int kFormatVersion = 1;
inline constexpr int kMaxNodes = 50;

// Invalid scenario content. `field` is a dotted path such as
// "obstacles[2].radius_m"; empty for syntax errors.
class ScenarioError : public InvalidInput {
 public:
  ScenarioError(std::string field, const std::string& message)
      : InvalidInput(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct TerrainSpec {
  std::string raster;  // PPM path; empty = synthetic terrain from `synthetic`
  int clusters = 3;
  env::TerrainParams synthetic;

  bool operator==(const TerrainSpec&) const = default;
};

struct GraphSpec {
  int node_count = 40;
  double edge_density = 0.1;
  int task_count = 30;
  double task_mean = 20.0;
  double task_std = 10.0;
  double speed_mps = 2.0;

  bool operator==(const GraphSpec&) const = default;
};

struct PlannerSpec {
  int tamp_population = 30;
  int tamp_iterations = 100;
  int opp_population = 16;
  int opp_iterations = 30;
  int interior_points = 5;
  double replan_tolerance = 0.1;
  double budget_reserve = 0.05;

  bool operator==(const PlannerSpec&) const = default;
};

struct Scenario {
  int format_version = kFormatVersion;
  std::uint64_t seed = 0;
  TerrainSpec terrain;
  GraphSpec graph;
  std::vector<std::vector<env::Vortex>> currents{{}};  // snapshot 0 first
  std::vector<exec::SnapshotSwitch> schedule;
  std::vector<env::Obstacle> obstacles;
  opp::VehicleLimits limits;
  PlannerSpec planners;
  double total_time_s = 10800.0;
  double time_threshold_s = 3.42e4;
  double phi1 = 1.0 / 3600.0;
  double phi2 = 1.0;

  bool operator==(const Scenario&) const = default;
};

// Throws ScenarioError naming the first offending field.
void validate(const Scenario& s);

std::string serialize(const Scenario& s);
// Parses and validates; malformed text or content raises ScenarioError.
Scenario parse_scenario(const std::string& text);

struct GenerateParams {
  GraphSpec graph;
  env::TerrainParams terrain;
  env::VortexFieldParams vortices;
  int current_snapshots = 1;
  double switch_time_s = 3600.0;  // first switch; later ones follow at the same spacing
  int obstacles = 3;
  double total_time_s = 10800.0;
  double time_threshold_s = 3.42e4;
};

Scenario generate_scenario(std::uint64_t seed, const GenerateParams& params = {});

// Graph construction inputs that differ per Monte Carlo run.
struct Topology {
  int node_count = 40;
  std::uint64_t seed = 0;
  std::vector<Vec2> layout;  // template positions (may be empty)
  double jitter_sigma_m = 0.0;
};

env::TerrainGrid build_terrain(const Scenario& s);

// Builds the runnable mission. Without a topology the scenario's own graph
// settings and seed are used.
exec::Mission build_mission(const Scenario& s, std::shared_ptr<const env::TerrainGrid> terrain,
                            const std::optional<Topology>& topology = std::nullopt);
exec::Mission build_mission(const Scenario& s);

exec::ExecConfig exec_config(const Scenario& s, tamp::Algorithm tamp_alg, opp::Algorithm opp_alg,
                             std::uint64_t seed);

}  // namespace auv::bench
