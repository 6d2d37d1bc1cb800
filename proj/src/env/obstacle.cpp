#include "auv/env/obstacle.h"

#include <cmath>

namespace auv::env {

void Obstacle::validate() const {
  if (!(radius_m > 0.0)) throw InvalidInput("obstacle radius must be positive");
  if (!(uncertainty_rate >= 0.0)) throw InvalidInput("obstacle uncertainty rate must be >= 0");
  if (!position.allFinite() || !velocity.allFinite()) throw InvalidInput("obstacle state must be finite");
  if (kind == ObstacleKind::Static && !velocity.isZero(0.0)) {
    throw InvalidInput("static obstacle with non-zero velocity");
  }
}

ObstacleRegion obstacle_region_at(const Obstacle& obs, double t) {
  if (!(t >= 0.0)) throw InvalidInput("obstacle query time must be >= 0");
  return {obs.position + obs.velocity * t, obs.radius_m + kZ98 * obs.uncertainty_rate * t};
}

}  // namespace auv::env
