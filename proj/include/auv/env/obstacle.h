#pragma once

#include "auv/common.h"

namespace auv::env {

// Radius multiplier enclosing 98% of a circular 2-D Gaussian position error.
inline const double kZ98 = 2.797149622536537;  // sqrt(-2 ln 0.02)

enum class ObstacleKind { Static, Moving };

struct Obstacle {
  Vec3 position = Vec3::Zero();
  double radius_m = 1.0;
  Vec3 velocity = Vec3::Zero();
  double uncertainty_rate = 0.0;  // m/s growth of the position std
  ObstacleKind kind = ObstacleKind::Static;

  // Throws InvalidInput on a non-positive radius, negative rate or a static
  // obstacle with non-zero velocity.
  void validate() const;
  bool operator==(const Obstacle&) const = default;
};

struct ObstacleRegion {
  Vec3 center;
  double radius_m;

  bool contains(const Vec3& p) const { return (p - center).squaredNorm() <= radius_m * radius_m; }
};

// Sphere that holds the obstacle with 98% confidence at time t >= 0 after the
// reference time.
ObstacleRegion obstacle_region_at(const Obstacle& obs, double t);

}  // namespace auv::env
