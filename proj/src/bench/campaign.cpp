#include "auv/bench/campaign.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "auv/tamp/route_eval.h"

namespace auv::bench {

std::string AlgoPair::name() const { return std::string(tamp::to_string(tamp)) + "+" + opp::to_string(opp); }

std::vector<AlgoPair> all_pairs() {
  std::vector<AlgoPair> out;
  for (auto t : {tamp::Algorithm::GA, tamp::Algorithm::PSO, tamp::Algorithm::ACO, tamp::Algorithm::BBO}) {
    for (auto o : {opp::Algorithm::DE, opp::Algorithm::FA, opp::Algorithm::BBO, opp::Algorithm::PSO}) {
      out.push_back({t, o});
    }
  }
  return out;
}

std::vector<AlgoPair> parse_pairs(const std::string& text) {
  if (text == "all") return all_pairs();
  std::vector<AlgoPair> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto plus = item.find('+');
    if (plus == std::string::npos) throw InvalidInput("algorithm pair must look like GA+DE: " + item);
    out.push_back({tamp::parse_algorithm(item.substr(0, plus)), opp::parse_algorithm(item.substr(plus + 1))});
  }
  if (out.empty()) throw InvalidInput("no algorithm pairs given");
  return out;
}

std::vector<Vec2> template_layout(const Scenario& s, const env::TerrainGrid& grid) {
  Rng rng(derive_seed(s.seed, {20}));
  std::uniform_real_distribution<double> ux(0.0, grid.width_m()), uy(0.0, grid.height_m());
  std::vector<Vec2> out;
  for (int i = 0; i < kMaxNodes; ++i) {
    Vec2 p(ux(rng), uy(rng));
    for (int attempt = 0; attempt < 10000 && !env::is_legal(grid, Vec3(p.x(), p.y(), 0.0)); ++attempt) {
      p = Vec2(ux(rng), uy(rng));
    }
    out.push_back(p);
  }
  return out;
}

Topology campaign_topology(const Scenario& s, const env::TerrainGrid& grid, const CampaignOptions& opts, int run) {
  const auto r = static_cast<std::uint64_t>(run);
  Rng rng(derive_seed(opts.seed, {r, 1}));
  std::uniform_int_distribution<int> nodes(opts.min_nodes, opts.max_nodes);
  Topology t;
  t.node_count = nodes(rng);
  t.seed = derive_seed(opts.seed, {r, 3});
  t.layout = template_layout(s, grid);
  t.jitter_sigma_m = opts.jitter_fraction * grid.width_m();
  return t;
}

RunRecord run_single(const exec::Mission& m, const Scenario& s, const AlgoPair& pair, std::uint64_t seed,
                     exec::Mode mode, exec::Accounting accounting) {
  RunRecord rec;
  rec.tamp = tamp::to_string(pair.tamp);
  rec.opp = opp::to_string(pair.opp);
  rec.node_count = m.graph.vertex_count();
  auto cfg = exec_config(s, pair.tamp, pair.opp, seed);
  cfg.mode = mode;
  cfg.accounting = accounting;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = exec::run_mission(m, cfg);
  rec.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.success = rep.success;
  rec.error = rep.failure;
  rec.compute_s = rep.compute_time_s;
  rec.planner_calls = rep.tamp_calls + rep.opp_calls;
  rec.evaluations = rep.tamp_evaluations + rep.opp_evaluations;
  if (!rep.initial_route.empty()) {
    const auto ev = tamp::route_cost(m.graph, rep.initial_route, m.time_threshold_s);
    rec.route_time_s = ev.time_s;
    rec.route_cost = ev.cost;
    rec.route_violation = ev.time_violation_s;
  } else {
    rec.route_time_s = rec.route_cost = rec.route_violation = std::nan("");
  }
  rec.flown_time_s = rep.leg_time_s;
  rec.total_weight = rep.total_weight;
  rec.completed_tasks = rep.completed_tasks;
  rec.path_violation = rep.violation_total;
  rec.total_cost = rep.cost;
  rec.residual_s = rep.residual_s;
  rec.replans = rep.replans;
  rec.conservation_error = rep.conservation_error();
  return rec;
}

std::vector<RunRecord> run_campaign(const Scenario& s, const CampaignOptions& opts) {
  if (opts.runs < 1) throw InvalidInput("runs must be >= 1");
  if (opts.pairs.empty()) throw InvalidInput("no algorithm pairs");
  if (opts.parallelism < 1) throw InvalidInput("parallelism must be >= 1");
  if (opts.min_nodes < 2 || opts.max_nodes > kMaxNodes || opts.min_nodes > opts.max_nodes) {
    throw InvalidInput("node count range must lie in [2, 50]");
  }
  validate(s);
  auto terrain = std::make_shared<const env::TerrainGrid>(build_terrain(s));

  const std::size_t per_run = opts.pairs.size();
  const std::size_t total = static_cast<std::size_t>(opts.runs) * per_run;
  std::vector<RunRecord> records(total);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const int run = static_cast<int>(i / per_run);
      const AlgoPair& pair = opts.pairs[i % per_run];
      RunRecord rec;
      try {
        const auto topo = campaign_topology(s, *terrain, opts, run);
        const auto mission = build_mission(s, terrain, topo);
        const auto seed = derive_seed(opts.seed, {static_cast<std::uint64_t>(run), 2,
                                                  static_cast<std::uint64_t>(pair.tamp),
                                                  static_cast<std::uint64_t>(pair.opp)});
        rec = run_single(mission, s, pair, seed, opts.mode, opts.accounting);
      } catch (const std::exception& e) {
        const double nan = std::nan("");
        rec.tamp = tamp::to_string(pair.tamp);
        rec.opp = opp::to_string(pair.opp);
        rec.error = std::string("error: ") + e.what();
        rec.compute_s = rec.route_time_s = rec.route_cost = rec.route_violation = nan;
        rec.flown_time_s = rec.total_weight = rec.path_violation = rec.total_cost = rec.residual_s = nan;
        rec.conservation_error = nan;
      }
      rec.run = run;
      records[i] = std::move(rec);
    }
  };
  const int threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(opts.parallelism), total));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

// --- CSV --------------------------------------------------------------------

namespace {

const char* kHeader =
    "run,tamp,opp,node_count,success,error,compute_s,planner_calls,evaluations,route_time_s,route_cost,"
    "route_violation,flown_time_s,total_weight,completed_tasks,path_violation,total_cost,residual_s,replans,"
    "conservation_error";

std::string clean(std::string s) {
  for (auto& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  }
  return s;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s, std::size_t line) {
  if (s == "nan" || s == "-nan") return std::nan("");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw InvalidInput("records line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

long parse_long(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw InvalidInput("records line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

void write_records_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << kHeader << '\n';
  for (const auto& r : records) {
    out << r.run << ',' << r.tamp << ',' << r.opp << ',' << r.node_count << ',' << (r.success ? 1 : 0) << ','
        << clean(r.error) << ',' << num(r.compute_s) << ',' << r.planner_calls << ',' << r.evaluations << ','
        << num(r.route_time_s) << ',' << num(r.route_cost) << ',' << num(r.route_violation) << ','
        << num(r.flown_time_s) << ',' << num(r.total_weight) << ',' << r.completed_tasks << ','
        << num(r.path_violation) << ',' << num(r.total_cost) << ',' << num(r.residual_s) << ',' << r.replans << ','
        << num(r.conservation_error) << '\n';
  }
}

void write_timing_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << "run,tamp,opp,wall_s\n";
  for (const auto& r : records) out << r.run << ',' << r.tamp << ',' << r.opp << ',' << num(r.wall_s) << '\n';
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("records file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw InvalidInput("records file has an unexpected header");
  std::vector<RunRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 20) throw InvalidInput("records line " + std::to_string(lineno) + ": expected 20 fields");
    RunRecord r;
    r.run = static_cast<int>(parse_long(f[0], lineno));
    r.tamp = f[1];
    r.opp = f[2];
    if (r.tamp.empty() || r.opp.empty()) throw InvalidInput("records line " + std::to_string(lineno) + ": empty algorithm");
    r.node_count = static_cast<int>(parse_long(f[3], lineno));
    r.success = parse_long(f[4], lineno) != 0;
    r.error = f[5];
    r.compute_s = parse_double(f[6], lineno);
    r.planner_calls = static_cast<int>(parse_long(f[7], lineno));
    r.evaluations = parse_long(f[8], lineno);
    r.route_time_s = parse_double(f[9], lineno);
    r.route_cost = parse_double(f[10], lineno);
    r.route_violation = parse_double(f[11], lineno);
    r.flown_time_s = parse_double(f[12], lineno);
    r.total_weight = parse_double(f[13], lineno);
    r.completed_tasks = static_cast<int>(parse_long(f[14], lineno));
    r.path_violation = parse_double(f[15], lineno);
    r.total_cost = parse_double(f[16], lineno);
    r.residual_s = parse_double(f[17], lineno);
    r.replans = static_cast<int>(parse_long(f[18], lineno));
    r.conservation_error = parse_double(f[19], lineno);
    out.push_back(std::move(r));
  }
  return out;
}

// --- statistics ---------------------------------------------------------------

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidInput("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BoxStats box_stats(const std::vector<double>& values) {
  if (values.empty()) throw InvalidInput("statistics of an empty sample");
  BoxStats b;
  b.count = values.size();
  b.min = *std::min_element(values.begin(), values.end());
  b.max = *std::max_element(values.begin(), values.end());
  b.q1 = quantile(values, 0.25);
  b.median = quantile(values, 0.5);
  b.q3 = quantile(values, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr, hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = b.max;
  b.whisker_high = b.min;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      ++b.outliers;
    } else {
      b.whisker_low = std::min(b.whisker_low, v);
      b.whisker_high = std::max(b.whisker_high, v);
    }
  }
  return b;
}

const std::vector<Metric>& report_metrics() {
  static const std::vector<Metric> m{
      {"compute_s", Better::Lower},         {"planner_calls", Better::Lower},
      {"route_time_s", Better::Lower},      {"route_cost", Better::Lower},
      {"route_violation", Better::Lower},   {"total_weight", Better::Higher},
      {"completed_tasks", Better::Higher},  {"path_violation", Better::Lower},
      {"total_cost", Better::Lower},        {"residual_s", Better::SmallestNonNegative},
  };
  return m;
}

double metric_value(const RunRecord& r, const std::string& metric) {
  if (metric == "compute_s") return r.compute_s;
  if (metric == "planner_calls") return r.planner_calls;
  if (metric == "route_time_s") return r.route_time_s;
  if (metric == "route_cost") return r.route_cost;
  if (metric == "route_violation") return r.route_violation;
  if (metric == "total_weight") return r.total_weight;
  if (metric == "completed_tasks") return r.completed_tasks;
  if (metric == "path_violation") return r.path_violation;
  if (metric == "total_cost") return r.total_cost;
  if (metric == "residual_s") return r.residual_s;
  throw InvalidInput("unknown metric: " + metric);
}

namespace {

// Sort key for ranking: smaller is better.
std::pair<int, double> rank_key(Better b, double median) {
  switch (b) {
    case Better::Lower: return {0, median};
    case Better::Higher: return {0, -median};
    case Better::SmallestNonNegative: return median >= 0.0 ? std::pair{0, median} : std::pair{1, -median};
  }
  return {0, median};
}

}  // namespace

CampaignReport make_report(const std::vector<RunRecord>& records) {
  if (records.empty()) throw EmptyCampaign("campaign has no records");
  CampaignReport rep;
  const std::vector<std::pair<std::string, std::string (*)(const RunRecord&)>> groupings{
      {"pair", [](const RunRecord& r) { return r.pair(); }},
      {"tamp", [](const RunRecord& r) { return r.tamp; }},
      {"opp", [](const RunRecord& r) { return r.opp; }},
  };
  for (const auto& [grouping, key] : groupings) {
    std::map<std::string, std::vector<const RunRecord*>> groups;
    for (const auto& r : records) groups[key(r)].push_back(&r);
    for (const auto& metric : report_metrics()) {
      std::vector<std::pair<std::string, double>> medians;
      for (const auto& [name, members] : groups) {
        std::vector<double> vals;
        for (const auto* r : members) {
          const double v = metric_value(*r, metric.name);
          if (!std::isnan(v)) vals.push_back(v);
        }
        if (vals.empty()) continue;
        SummaryRow row{grouping, name, metric.name, box_stats(vals)};
        medians.emplace_back(name, row.stats.median);
        rep.summary.push_back(std::move(row));
      }
      // std::map iteration already gives alphabetical order; stable_sort keeps
      // it among equal keys.
      std::stable_sort(medians.begin(), medians.end(), [&](const auto& a, const auto& b) {
        return rank_key(metric.better, a.second) < rank_key(metric.better, b.second);
      });
      for (std::size_t i = 0; i < medians.size(); ++i) {
        RankRow rr{grouping, metric.name, static_cast<int>(i + 1), medians[i].first, medians[i].second, false};
        const auto k = rank_key(metric.better, medians[i].second);
        rr.tie = (i > 0 && rank_key(metric.better, medians[i - 1].second) == k) ||
                 (i + 1 < medians.size() && rank_key(metric.better, medians[i + 1].second) == k);
        rep.ranking.push_back(rr);
      }
    }
  }
  return rep;
}

void write_summary_csv(const CampaignReport& r, std::ostream& out) {
  out << "grouping,group,metric,count,min,q1,median,q3,max,whisker_low,whisker_high,outliers,whisker_rule\n";
  for (const auto& s : r.summary) {
    const auto& b = s.stats;
    out << s.grouping << ',' << s.group << ',' << s.metric << ',' << b.count << ',' << num(b.min) << ','
        << num(b.q1) << ',' << num(b.median) << ',' << num(b.q3) << ',' << num(b.max) << ',' << num(b.whisker_low)
        << ',' << num(b.whisker_high) << ',' << b.outliers << ",tukey-1.5iqr\n";
  }
}

void write_ranking_csv(const CampaignReport& r, std::ostream& out) {
  out << "grouping,metric,rank,group,median,tie\n";
  for (const auto& k : r.ranking) {
    out << k.grouping << ',' << k.metric << ',' << k.rank << ',' << k.group << ',' << num(k.median) << ','
        << (k.tie ? 1 : 0) << '\n';
  }
}

}  // namespace auv::bench
