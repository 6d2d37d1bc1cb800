#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "auv/env/current.h"
#include "auv/env/obstacle.h"
#include "auv/env/terrain.h"

namespace auv::opp {

struct VehicleLimits {
  double cruise_mps = 2.0;
  double surge_max_mps = 2.57;  // ~5 knots
  double sway_max_mps = 1.0;
  double yaw_rate_max = 0.2;  // rad/s
  double z_min_m = 0.0;
  double z_max_m = 100.0;

  void validate() const;
  bool operator==(const VehicleLimits&) const = default;
};

// Multipliers applied to the raw violation totals in the path cost.
struct ViolationWeights {
  double z_min = 1.0;
  double z_max = 1.0;
  double surge = 10.0;
  double sway = 10.0;
  double yaw_rate = 10.0;
  double collision = 10.0;
  double collision_extent = 10.0;
};

// Raw totals over all samples: depth terms in metres, surge and sway in m/s,
// yaw rate in rad/s; collision is 0 or 1 and collision_extent is the
// fraction of samples in collision, which gives the optimisers a gradient
// out of an obstacle.
struct Violations {
  double z_min = 0.0;
  double z_max = 0.0;
  double surge = 0.0;
  double sway = 0.0;
  double yaw_rate = 0.0;
  double collision = 0.0;
  double collision_extent = 0.0;

  double weighted_total(const ViolationWeights& w) const;
  Violations weighted(const ViolationWeights& w) const;
  bool any() const;
};

enum class TimeMode {
  StillWater,    // dt = ds / cruise
  CurrentAware,  // dt = ds / max(0.1, cruise + current . tangent)
};

// One trajectory sample. u, v, w are body-frame surge, sway and heave speeds
// over ground; yaw and pitch follow the path tangent.
struct PathSample {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  double pitch = 0.0;
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  double yaw_rate = 0.0;
};

struct PathCandidate {
  std::vector<Vec3> control;  // full polygon, endpoints included
  std::vector<PathSample> samples;
  double time_s = 0.0;
  double arc_length_m = 0.0;
  Violations violations;
  double cost = kInf;
};

// Immutable view of the world handed to one planner invocation.
struct Environment {
  std::shared_ptr<const env::TerrainGrid> terrain;
  std::shared_ptr<const env::CurrentField> current;
  std::shared_ptr<const std::vector<env::Obstacle>> obstacles;
  double clock_s = 0.0;  // mission time at the start of the leg
  int snapshot_id = 0;
};

// Clamped uniform B-spline of degree min(3, n-1) through the control polygon,
// evaluated at `samples` parameter values spaced uniformly on [0, 1].
std::vector<Vec3> bspline_points(std::span<const Vec3> control, int samples);

int default_sample_count(int interior_points);

// Samples the spline and fills the kinematic state. Throws InvalidInput when
// the endpoints coincide.
PathCandidate spline_path(std::span<const Vec3> control, int samples, const VehicleLimits& limits,
                          const env::CurrentField& field, TimeMode mode = TimeMode::CurrentAware);

Violations path_violations(const PathCandidate& path, const env::TerrainGrid& grid,
                           std::span<const env::Obstacle> obstacles, const VehicleLimits& limits,
                           double clock_s);

// C = T / T_ref + Q * sum(weight_i * term_i).
double path_cost(const PathCandidate& path, const Violations& v, const ViolationWeights& w, double penalty_q,
                 double reference_time_s);

// t,X,Y,Z,psi,theta,u,v,w
void write_trajectory_csv(const PathCandidate& path, std::ostream& out);

}  // namespace auv::opp
