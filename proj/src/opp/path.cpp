#include "auv/opp/path.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace auv::opp {

void VehicleLimits::validate() const {
  if (!(cruise_mps > 0.0) || !(surge_max_mps > 0.0) || !(sway_max_mps > 0.0) || !(yaw_rate_max > 0.0)) {
    throw InvalidInput("vehicle limits must be positive");
  }
  if (!(z_min_m < z_max_m)) throw InvalidInput("z_min must be below z_max");
}

double Violations::weighted_total(const ViolationWeights& w) const {
  return w.z_min * z_min + w.z_max * z_max + w.surge * surge + w.sway * sway + w.yaw_rate * yaw_rate +
         w.collision * collision + w.collision_extent * collision_extent;
}

Violations Violations::weighted(const ViolationWeights& w) const {
  return {w.z_min * z_min,           w.z_max * z_max,         w.surge * surge,
          w.sway * sway,             w.yaw_rate * yaw_rate,   w.collision * collision,
          w.collision_extent * collision_extent};
}

bool Violations::any() const {
  return z_min > 0.0 || z_max > 0.0 || surge > 0.0 || sway > 0.0 || yaw_rate > 0.0 || collision > 0.0;
}

std::vector<Vec3> bspline_points(std::span<const Vec3> control, int samples) {
  const int n = static_cast<int>(control.size());
  if (n < 2) throw InvalidInput("a path needs at least two control points");
  if (samples < 2) throw InvalidInput("a path needs at least two samples");
  const int p = std::min(3, n - 1);
  // Clamped uniform knots: p+1 zeros, n-p-1 interior, p+1 ones.
  std::vector<double> knots(static_cast<std::size_t>(n + p + 1));
  const int spans = n - p;
  for (int i = 0; i < n + p + 1; ++i) {
    if (i <= p) knots[static_cast<std::size_t>(i)] = 0.0;
    else if (i >= n) knots[static_cast<std::size_t>(i)] = 1.0;
    else knots[static_cast<std::size_t>(i)] = static_cast<double>(i - p) / spans;
  }
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(samples));
  std::array<Vec3, 4> d;
  for (int s = 0; s < samples; ++s) {
    const double u = static_cast<double>(s) / (samples - 1);
    int k = std::min(p + static_cast<int>(u * spans), n - 1);  // knots[k] <= u < knots[k+1]
    for (int j = 0; j <= p; ++j) d[static_cast<std::size_t>(j)] = control[static_cast<std::size_t>(j + k - p)];
    for (int r = 1; r <= p; ++r) {
      for (int j = p; j >= r; --j) {
        const double lo = knots[static_cast<std::size_t>(j + k - p)];
        const double hi = knots[static_cast<std::size_t>(j + 1 + k - r)];
        const double a = hi > lo ? (u - lo) / (hi - lo) : 0.0;
        d[static_cast<std::size_t>(j)] = (1.0 - a) * d[static_cast<std::size_t>(j - 1)] + a * d[static_cast<std::size_t>(j)];
      }
    }
    out.push_back(d[static_cast<std::size_t>(p)]);
  }
  // Exact endpoint interpolation regardless of rounding.
  out.front() = control.front();
  out.back() = control.back();
  return out;
}

int default_sample_count(int interior_points) { return std::max(200, 20 * interior_points); }

namespace {

double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  if (a > pi || a < -pi) a = std::remainder(a, 2.0 * pi);
  return a;
}

}  // namespace

PathCandidate spline_path(std::span<const Vec3> control, int samples, const VehicleLimits& limits,
                          const env::CurrentField& field, TimeMode mode) {
  if (control.size() < 2) throw InvalidInput("a path needs at least two control points");
  if ((control.back() - control.front()).norm() < 1e-9) throw InvalidInput("path endpoints coincide");
  PathCandidate pc;
  pc.control.assign(control.begin(), control.end());
  const auto pts = bspline_points(control, samples);
  const std::size_t m = pts.size();

  // Per-segment heading, pitch, duration and body-frame speeds.
  const std::size_t segs = m - 1;
  std::vector<double> yaw(segs), pitch(segs), dt(segs), su(segs), sv(segs), sw(segs);
  double last_yaw = 0.0, last_pitch = 0.0;
  bool have_heading = false;
  for (std::size_t i = 0; i < segs; ++i) {
    const Vec3 d = pts[i + 1] - pts[i];
    const double ds = d.norm();
    const double dh = std::sqrt(d.x() * d.x() + d.y() * d.y());
    if (ds > 1e-12) {
      last_yaw = dh > 1e-12 ? std::atan2(d.y(), d.x()) : last_yaw;
      last_pitch = std::atan2(-d.z(), dh);
      if (!have_heading) {
        for (std::size_t j = 0; j < i; ++j) {
          yaw[j] = last_yaw;
          pitch[j] = last_pitch;
        }
        have_heading = true;
      }
    }
    yaw[i] = last_yaw;
    pitch[i] = last_pitch;
    const Vec3 mid = 0.5 * (pts[i] + pts[i + 1]);
    const Vec2 c = field.at(Vec2(mid.x(), mid.y()));
    // Heading and pitch direction cosines without re-evaluating trig when the
    // segment itself defines them.
    Vec2 h;
    double cp, sp;
    if (ds > 1e-12 && dh > 1e-12) {
      h = Vec2(d.x() / dh, d.y() / dh);
      cp = dh / ds;
      sp = -d.z() / ds;
    } else {
      h = Vec2(std::cos(yaw[i]), std::sin(yaw[i]));
      cp = std::cos(pitch[i]);
      sp = std::sin(pitch[i]);
    }
    const Vec2 nrm(-h.y(), h.x());
    su[i] = limits.cruise_mps * cp + c.dot(h);
    sv[i] = c.dot(nrm);
    sw[i] = limits.cruise_mps * sp;
    double speed = limits.cruise_mps;
    if (mode == TimeMode::CurrentAware && ds > 1e-12) {
      const Vec3 tangent = d / ds;
      speed = std::max(0.1, limits.cruise_mps + c.x() * tangent.x() + c.y() * tangent.y());
    }
    dt[i] = ds / speed;
    pc.arc_length_m += ds;
  }

  pc.samples.resize(m);
  double t = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    auto& s = pc.samples[i];
    const std::size_t seg = std::min(i, segs - 1);
    s.t = t;
    s.position = pts[i];
    s.yaw = yaw[seg];
    s.pitch = pitch[seg];
    s.u = su[seg];
    s.v = sv[seg];
    s.w = sw[seg];
    if (i > 0 && i < segs) {
      const double span = 0.5 * (dt[i - 1] + dt[i]);
      s.yaw_rate = span > 0.0 ? wrap_angle(yaw[i] - yaw[i - 1]) / span : 0.0;
    }
    if (i < segs) t += dt[i];
  }
  pc.time_s = t;
  return pc;
}

Violations path_violations(const PathCandidate& path, const env::TerrainGrid& grid,
                           std::span<const env::Obstacle> obstacles, const VehicleLimits& limits,
                           double clock_s) {
  Violations v;
  std::size_t hits = 0;
  for (const auto& s : path.samples) {
    const double z = s.position.z();
    v.z_min += std::max(0.0, limits.z_min_m - z);
    v.z_max += std::max(0.0, z - limits.z_max_m);
    v.surge += std::max(0.0, std::abs(s.u) - limits.surge_max_mps);
    v.sway += std::max(0.0, std::abs(s.v) - limits.sway_max_mps);
    v.yaw_rate += std::max(0.0, std::abs(s.yaw_rate) - limits.yaw_rate_max);
    bool hit = !env::is_legal(grid, s.position);
    for (std::size_t k = 0; !hit && k < obstacles.size(); ++k) {
      hit = env::obstacle_region_at(obstacles[k], clock_s + s.t).contains(s.position);
    }
    hits += hit;
  }
  v.collision = hits > 0 ? 1.0 : 0.0;
  if (!path.samples.empty()) v.collision_extent = static_cast<double>(hits) / static_cast<double>(path.samples.size());
  return v;
}

double path_cost(const PathCandidate& path, const Violations& v, const ViolationWeights& w, double penalty_q,
                 double reference_time_s) {
  if (!(reference_time_s > 0.0)) throw InvalidInput("reference time must be positive");
  return path.time_s / reference_time_s + penalty_q * v.weighted_total(w);
}

void write_trajectory_csv(const PathCandidate& path, std::ostream& out) {
  out << "t,X,Y,Z,psi,theta,u,v,w\n";
  char buf[256];
  for (const auto& s : path.samples) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.9f,%.9f,%.9f,%.9f,%.9f\n", s.t, s.position.x(),
                  s.position.y(), s.position.z(), s.yaw, s.pitch, s.u, s.v, s.w);
    out << buf;
  }
}

}  // namespace auv::opp
