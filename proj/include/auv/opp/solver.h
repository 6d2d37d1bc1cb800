#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "auv/opp/operators.h"
#include "auv/opp/path.h"
#include "auv/tamp/operators.h"

namespace auv::opp {

enum class Algorithm { DE, FA, BBO, PSO };

const char* to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct OppConfig {
  Algorithm algorithm = Algorithm::DE;
  int interior_points = 5;
  int population = 16;  // i_max
  int iterations = 30;  // t_max
  int samples = 0;      // 0 = default_sample_count(interior_points)
  ViolationWeights weights;
  double penalty_q = 1.0;
  VehicleLimits limits;
  TimeMode time_mode = TimeMode::CurrentAware;
  double corridor_margin = 0.25;  // fraction of the start-goal distance per axis
  // Put the straight start-goal segment into every cold initial population.
  bool seed_straight = true;
  double warm_fraction = 0.5;
  double warm_jitter = 0.05;  // Gaussian sigma as a fraction of corridor width
  DeParams de;
  FaParams fa;
  tamp::BboParams bbo;
  tamp::PsoParams pso{0.7, 1.5, 1.5, 0.0, 0.0};
  double pso_velocity_fraction = 0.2;  // velocity limit per axis, fraction of corridor width
  std::uint64_t seed = 0;

  int sample_count() const { return samples > 0 ? samples : default_sample_count(interior_points); }
  void validate() const;
};

// Box bounds for the flattened interior control points [x1,y1,z1,x2,...].
struct Corridor {
  VecX lower;
  VecX upper;

  VecX width() const { return upper - lower; }
  VecX clamp(const VecX& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
};

Corridor make_corridor(const Vec3& start, const Vec3& goal, int interior_points, const OppConfig& cfg,
                       const env::TerrainGrid& grid);

// Interior points evenly spaced on the start-goal segment.
VecX straight_genome(const Vec3& start, const Vec3& goal, int interior_points);

std::vector<Vec3> assemble_polygon(const Vec3& start, const Vec3& goal, const VecX& genome);

// Builds and scores candidates for one leg.
class PathProblem {
 public:
  PathProblem(const Vec3& start, const Vec3& goal, const Environment& env, const OppConfig& cfg);

  PathCandidate evaluate(const VecX& genome) const;

  const Corridor& corridor() const { return corridor_; }
  double reference_time() const { return reference_time_; }
  int dimension() const { return static_cast<int>(corridor_.lower.size()); }
  long evaluations() const { return evaluations_; }

 private:
  Vec3 start_;
  Vec3 goal_;
  Environment env_;
  const OppConfig* cfg_;
  Corridor corridor_;
  double reference_time_;
  mutable long evaluations_ = 0;
};

struct OppIteration {
  int iteration = 0;
  double best_cost = kInf;
  double violation_total = 0.0;
};

struct OppResult {
  PathCandidate path;
  VecX genome;
  bool violated = false;
  double compute_seconds = 0.0;
  long evaluations = 0;
  std::vector<OppIteration> log;
};

// Optimises the interior control points of one leg. A warm-start polygon
// (interior points only, as a flattened genome) seeds part of the initial
// population; one of the cold members is always the straight segment.
// When no violation-free path is found the best path is returned with
// `violated` set.
OppResult solve_opp(const Vec3& start, const Vec3& goal, const Environment& env, const OppConfig& cfg,
                    const std::optional<VecX>& warm_start = std::nullopt);

// iteration,best_cost,violation_total
void write_convergence_csv(const std::vector<OppIteration>& log, std::ostream& out);

}  // namespace auv::opp
