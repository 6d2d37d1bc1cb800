#pragma once

#include <vector>

#include "auv/common.h"

namespace auv::env {

// Lamb-Oseen vortex. strength is the circulation in m^2/s; its sign picks
// the rotation direction (positive = counter-clockwise).
struct Vortex {
  Vec2 center = Vec2::Zero();
  double radius_m = 1.0;
  double strength = 0.0;

  bool operator==(const Vortex&) const = default;
};

class CurrentField {
 public:
  CurrentField() = default;
  explicit CurrentField(std::vector<Vortex> vortices);

  // Superposed horizontal current (u_c, v_c) at p. The vertical component is
  // identically zero.
  Vec2 at(const Vec2& p) const;
  Vec3 at(const Vec3& p) const;

  const std::vector<Vortex>& vortices() const { return vortices_; }
  bool empty() const { return vortices_.empty(); }

 private:
  std::vector<Vortex> vortices_;
};

Vec2 vortex_velocity(const Vortex& v, const Vec2& p);

inline Vec2 current_at(const CurrentField& field, const Vec2& p) { return field.at(p); }

struct VortexFieldParams {
  int min_count = 5;
  int max_count = 10;
  double radius_min_m = 300.0;
  double radius_max_m = 1200.0;
  double peak_speed_min = 0.1;  // m/s
  double peak_speed_max = 0.5;

  bool operator==(const VortexFieldParams&) const = default;
};

// Random field inside [0,width] x [0,height] with a uniform vortex count and
// per-vortex peak speed drawn uniformly.
CurrentField random_current_field(std::uint64_t seed, double width_m, double height_m,
                                  const VortexFieldParams& params = {});

// Peak tangential speed of a Lamb-Oseen vortex, reached at r ~ 1.1209 l.
double vortex_peak_speed(double strength, double radius_m);

}  // namespace auv::env
