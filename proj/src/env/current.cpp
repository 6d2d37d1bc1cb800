#include "auv/env/current.h"

#include <cmath>
#include <numbers>

namespace auv::env {

CurrentField::CurrentField(std::vector<Vortex> vortices) : vortices_(std::move(vortices)) {
  for (const auto& v : vortices_) {
    if (!(v.radius_m > 0.0)) throw InvalidInput("vortex radius must be positive");
    if (!v.center.allFinite() || !std::isfinite(v.strength)) {
      throw InvalidInput("vortex parameters must be finite");
    }
  }
}

Vec2 vortex_velocity(const Vortex& v, const Vec2& p) {
  const Vec2 d = p - v.center;
  const double r2 = d.squaredNorm();
  if (r2 < 1e-18) return Vec2::Zero();  // removable singularity at the center
  const double l2 = v.radius_m * v.radius_m;
  // Beyond x = 38 the core factor 1 - e^{-x} rounds to exactly 1.
  const double x = r2 / l2;
  const double core = x > 38.0 ? 1.0 : -std::expm1(-x);
  const double k = v.strength / (2.0 * std::numbers::pi * r2) * core;
  return Vec2(-k * d.y(), k * d.x());
}

Vec2 CurrentField::at(const Vec2& p) const {
  Vec2 sum = Vec2::Zero();
  for (const auto& v : vortices_) sum += vortex_velocity(v, p);
  return sum;
}

Vec3 CurrentField::at(const Vec3& p) const {
  Vec2 uv = at(Vec2(p.x(), p.y()));
  return Vec3(uv.x(), uv.y(), 0.0);
}

double vortex_peak_speed(double strength, double radius_m) {
  // max over x of (1 - e^{-x^2}) / x, attained at x = 1.1209...
  constexpr double kPeak = 0.6381726863389515;
  return std::abs(strength) * kPeak / (2.0 * std::numbers::pi * radius_m);
}

CurrentField random_current_field(std::uint64_t seed, double width_m, double height_m,
                                  const VortexFieldParams& params) {
  if (params.min_count < 0 || params.max_count < params.min_count) {
    throw InvalidInput("vortex count range is empty");
  }
  Rng rng(seed);
  std::uniform_int_distribution<int> count(params.min_count, params.max_count);
  std::uniform_real_distribution<double> ux(0.0, width_m), uy(0.0, height_m);
  std::uniform_real_distribution<double> radius(params.radius_min_m, params.radius_max_m);
  std::uniform_real_distribution<double> peak(params.peak_speed_min, params.peak_speed_max);
  std::bernoulli_distribution ccw(0.5);
  std::vector<Vortex> out;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    Vortex v;
    v.center = Vec2(ux(rng), uy(rng));
    v.radius_m = radius(rng);
    double s = peak(rng) / vortex_peak_speed(1.0, v.radius_m);
    v.strength = ccw(rng) ? s : -s;
    out.push_back(v);
  }
  return CurrentField(std::move(out));
}

}  // namespace auv::env
