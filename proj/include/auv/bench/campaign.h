#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "auv/bench/scenario.h"

namespace auv::bench {

struct AlgoPair {
  tamp::Algorithm tamp = tamp::Algorithm::GA;
  opp::Algorithm opp = opp::Algorithm::DE;

  std::string name() const;  // "GA+DE"
};

std::vector<AlgoPair> all_pairs();
// Comma-separated "GA+DE,ACO+FA" or "all". Throws InvalidInput.
std::vector<AlgoPair> parse_pairs(const std::string& text);

struct CampaignOptions {
  int runs = 30;
  std::vector<AlgoPair> pairs = all_pairs();
  std::uint64_t seed = 0;
  int parallelism = 1;
  int min_nodes = 30;
  int max_nodes = 50;
  double jitter_fraction = 0.05;  // of terrain width
  exec::Mode mode = exec::Mode::Sequential;
  exec::Accounting accounting = exec::Accounting::Deterministic;
};

struct RunRecord {
  int run = 0;
  std::string tamp;
  std::string opp;
  int node_count = 0;
  bool success = false;
  std::string error;  // exception text or mission failure reason
  double compute_s = 0.0;  // charged planner time
  int planner_calls = 0;
  long evaluations = 0;
  double route_time_s = 0.0;  // expected time of the first TAMP route
  double route_cost = 0.0;
  double route_violation = 0.0;  // max(0, T_R - T_tau) of that route
  double flown_time_s = 0.0;
  double total_weight = 0.0;
  int completed_tasks = 0;
  double path_violation = 0.0;
  double total_cost = 0.0;
  double residual_s = 0.0;
  int replans = 0;
  double conservation_error = 0.0;
  double wall_s = 0.0;  // not part of the record file

  std::string pair() const { return tamp + "+" + opp; }
  bool operator==(const RunRecord&) const = default;
};

// Topology for run `run`: node count U{min..max}, template layout jittered.
Topology campaign_topology(const Scenario& s, const env::TerrainGrid& grid, const CampaignOptions& opts, int run);

// Template of 50 legal positions derived from the scenario seed.
std::vector<Vec2> template_layout(const Scenario& s, const env::TerrainGrid& grid);

RunRecord run_single(const exec::Mission& m, const Scenario& s, const AlgoPair& pair, std::uint64_t seed,
                     exec::Mode mode, exec::Accounting accounting);

// Records ordered by (run, pair order); individual failures are recorded.
std::vector<RunRecord> run_campaign(const Scenario& s, const CampaignOptions& opts);

void write_records_csv(const std::vector<RunRecord>& records, std::ostream& out);
void write_timing_csv(const std::vector<RunRecord>& records, std::ostream& out);
// Throws InvalidInput on malformed rows.
std::vector<RunRecord> read_records_csv(std::istream& in);

// ---------------------------------------------------------------------------

struct BoxStats {
  std::size_t count = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double whisker_low = 0.0;  // Tukey 1.5 IQR, clipped to the data
  double whisker_high = 0.0;
  std::size_t outliers = 0;
};

// Linear-interpolated quantile (h = (n-1)p). Throws on empty input.
double quantile(std::vector<double> values, double p);
BoxStats box_stats(const std::vector<double>& values);

enum class Better { Lower, Higher, SmallestNonNegative };

struct Metric {
  std::string name;
  Better better;
};

const std::vector<Metric>& report_metrics();
double metric_value(const RunRecord& r, const std::string& metric);

struct SummaryRow {
  std::string grouping;  // "pair", "tamp" or "opp"
  std::string group;
  std::string metric;
  BoxStats stats;
};

struct RankRow {
  std::string grouping;
  std::string metric;
  int rank = 0;
  std::string group;
  double median = 0.0;
  bool tie = false;
};

struct CampaignReport {
  std::vector<SummaryRow> summary;
  std::vector<RankRow> ranking;
};

class EmptyCampaign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Groups by pair, TAMP and OPP algorithm. Ranking is by median; equal
// medians are ordered alphabetically and flagged as ties.
CampaignReport make_report(const std::vector<RunRecord>& records);
void write_summary_csv(const CampaignReport& r, std::ostream& out);
void write_ranking_csv(const CampaignReport& r, std::ostream& out);

}  // namespace auv::bench
