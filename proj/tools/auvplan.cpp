#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "auv/bench/campaign.h"
#include "auv/bench/scenario.h"
#include "auv/exec/mission.h"

namespace fs = std::filesystem;
using namespace auv;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
}

struct GenerateArgs {
  std::uint64_t seed = 0;
  std::string out;
  bench::GenerateParams params;
};

struct RunArgs {
  std::string scenario;
  std::string tamp = "GA";
  std::string opp = "DE";
  std::uint64_t seed = 0;
  std::string out = "run_out";
  std::string mode = "sequential";
  std::string accounting = "wallclock";
  std::string cost_form = "realized-time";
};

struct CampaignArgs {
  std::string scenario;
  int runs = 30;
  bool full = false;
  std::string pairs = "all";
  std::uint64_t seed = 0;
  int parallelism = 1;
  std::string out = "campaign_out";
  std::string mode = "sequential";
  std::string accounting = "wallclock";
};

struct ReportArgs {
  std::string campaign;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  const auto s = bench::generate_scenario(a.seed, a.params);
  const auto text = bench::serialize(s);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    open_out(a.out) << text;
  }
  return 0;
}

int cmd_run(const RunArgs& a) {
  const auto tamp_alg = tamp::parse_algorithm(a.tamp);
  const auto opp_alg = opp::parse_algorithm(a.opp);
  const auto mode = exec::parse_mode(a.mode);
  const auto accounting = exec::parse_accounting(a.accounting);
  const auto form = exec::parse_cost_form(a.cost_form);
  const auto s = bench::parse_scenario(read_file(a.scenario));
  const auto mission = bench::build_mission(s);
  auto cfg = bench::exec_config(s, tamp_alg, opp_alg, a.seed);
  cfg.mode = mode;
  cfg.accounting = accounting;
  cfg.cost_form = form;
  const auto rep = exec::run_mission(mission, cfg);

  make_dir(a.out);
  const fs::path dir(a.out);
  {
    auto o = open_out(dir / "report.json");
    exec::write_report_json(rep, o);
  }
  {
    auto o = open_out(dir / "transcript.jsonl");
    exec::write_transcript(rep, o);
  }
  {
    auto o = open_out(dir / "legs.csv");
    exec::write_legs_csv(rep, o);
  }
  for (std::size_t i = 0; i < rep.legs.size(); ++i) {
    auto t = open_out(dir / ("trajectory_leg" + std::to_string(i) + ".csv"));
    opp::write_trajectory_csv(rep.legs[i].path, t);
    auto c = open_out(dir / ("convergence_leg" + std::to_string(i) + ".csv"));
    opp::write_convergence_csv(rep.legs[i].convergence, c);
  }
  for (std::size_t i = 0; i < rep.tamp_logs.size(); ++i) {
    auto o = open_out(dir / ("tamp_convergence" + std::to_string(i) + ".csv"));
    tamp::write_iteration_csv(rep.tamp_logs[i], o);
  }
  std::printf("%s: %zu legs, %d re-plans, residual %.1f s, C_M %.6g\n",
              rep.success ? "mission complete" : ("mission failed (" + rep.failure + ")").c_str(), rep.legs.size(),
              rep.replans, rep.residual_s, rep.cost);
  return 0;
}

void write_report_files(const bench::CampaignReport& report, const fs::path& dir) {
  auto s = open_out(dir / "summary.csv");
  bench::write_summary_csv(report, s);
  auto r = open_out(dir / "ranking.csv");
  bench::write_ranking_csv(report, r);
}

int cmd_montecarlo(const CampaignArgs& a) {
  bench::CampaignOptions opts;
  opts.pairs = bench::parse_pairs(a.pairs);
  opts.runs = a.full ? 150 : a.runs;
  opts.seed = a.seed;
  opts.parallelism = a.parallelism;
  opts.mode = exec::parse_mode(a.mode);
  opts.accounting = exec::parse_accounting(a.accounting);
  const auto s = bench::parse_scenario(read_file(a.scenario));
  const auto records = bench::run_campaign(s, opts);

  make_dir(a.out);
  const fs::path dir(a.out);
  {
    auto o = open_out(dir / "records.csv");
    bench::write_records_csv(records, o);
  }
  {
    auto o = open_out(dir / "timing.csv");
    bench::write_timing_csv(records, o);
  }
  write_report_files(bench::make_report(records), dir);
  int ok = 0;
  for (const auto& r : records) ok += r.success;
  std::printf("%zu records, %d successful missions\n", records.size(), ok);
  return 0;
}

int cmd_report(const ReportArgs& a) {
  std::ifstream in(a.campaign);
  if (!in) throw UsageError("cannot open " + a.campaign);
  const auto records = bench::read_records_csv(in);
  const auto report = bench::make_report(records);
  if (!a.out.empty()) {
    make_dir(a.out);
    write_report_files(report, fs::path(a.out));
  }
  for (const auto& r : report.ranking) {
    if (r.grouping == "pair") continue;
    std::printf("%-5s %-16s %2d %-4s median %-12.6g%s\n", r.grouping.c_str(), r.metric.c_str(), r.rank,
                r.group.c_str(), r.median, r.tie ? " (tie)" : "");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AUV mission and path planning bench"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "write a scenario file");
  g->add_option("--seed", gen.seed, "scenario seed");
  g->add_option("-o,--out", gen.out, "output file (default stdout)");
  g->add_option("--nodes", gen.params.graph.node_count, "waypoint count");
  g->add_option("--density", gen.params.graph.edge_density, "edge density");
  g->add_option("--tasks", gen.params.graph.task_count, "task count");
  g->add_option("--total-time", gen.params.total_time_s, "T_Total in seconds");
  g->add_option("--threshold", gen.params.time_threshold_s, "route time threshold in seconds");
  g->add_option("--snapshots", gen.params.current_snapshots, "number of current maps");
  g->add_option("--switch-time", gen.params.switch_time_s, "seconds between current map switches");
  g->add_option("--obstacles", gen.params.obstacles, "obstacle count");

  RunArgs run;
  auto* r = app.add_subcommand("run", "fly one mission");
  r->add_option("--scenario", run.scenario, "scenario file")->required();
  r->add_option("--tamp", run.tamp, "GA, PSO, ACO or BBO");
  r->add_option("--opp", run.opp, "DE, FA, BBO or PSO");
  r->add_option("--seed", run.seed, "mission seed");
  r->add_option("-o,--out", run.out, "output directory");
  r->add_option("--mode", run.mode, "sequential or concurrent");
  r->add_option("--accounting", run.accounting, "wallclock or deterministic");
  r->add_option("--cost-form", run.cost_form, "realized-time or path-cost-sum");

  CampaignArgs mc;
  auto* m = app.add_subcommand("montecarlo", "run a Monte Carlo campaign");
  m->add_option("--scenario", mc.scenario, "scenario template file")->required();
  m->add_option("--runs", mc.runs, "number of runs")->check(CLI::PositiveNumber);
  m->add_flag("--full", mc.full, "150 runs");
  m->add_option("--pairs", mc.pairs, "all or a list like GA+DE,ACO+FA");
  m->add_option("--seed", mc.seed, "campaign seed");
  m->add_option("-j,--parallelism", mc.parallelism, "worker threads")->check(CLI::PositiveNumber);
  m->add_option("-o,--out", mc.out, "output directory");
  m->add_option("--mode", mc.mode, "sequential or concurrent");
  m->add_option("--accounting", mc.accounting, "wallclock or deterministic");

  ReportArgs rep;
  auto* p = app.add_subcommand("report", "aggregate a records file");
  p->add_option("--campaign", rep.campaign, "records.csv from montecarlo")->required();
  p->add_option("-o,--out", rep.out, "directory for summary.csv and ranking.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*r) return cmd_run(run);
    if (*m) return cmd_montecarlo(mc);
    if (*p) return cmd_report(rep);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const bench::EmptyCampaign& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 2;
}
