#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "centrinet/errors.hpp"
#include "centrinet/experiment.hpp"

using namespace centrinet;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg = preset_config("desk");
  cfg.num_nodes = 20;
  cfg.radio_range_m = 35;
  cfg.sim_time_s = 12;
  cfg.num_runs = 2;
  cfg.num_connections = 4;
  cfg.anomaly_inject_time_s = 5;
  cfg.anomaly_size_bytes = 20'000;
  cfg.seed = 3;
  return cfg;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "centrinet_experiment_test" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Relative path -> contents for every file under `dir`.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) out[fs::relative(entry.path(), dir).string()] = slurp(entry.path());
  }
  return out;
}

std::string summary_text(const ExperimentConfig& cfg, const ExperimentReport& r) {
  std::stringstream ss;
  make_summary(cfg, r).write(ss);
  return ss.str();
}

}  // namespace

TEST(Experiment, SameSeedSameArtifacts) {
  const ExperimentConfig cfg = tiny_config();
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  run_experiment(cfg, a);
  RunOptions parallel;
  parallel.jobs = 3;
  run_experiment(cfg, b, parallel);
  const auto sa = snapshot(a);
  EXPECT_EQ(sa, snapshot(b));
  for (const char* name : {"topology.txt", "centrality.csv", "config.txt", "ranking.csv",
                           "summary.txt", "detection.csv", "detection_p15.csv",
                           "traces/baseline_000.tr", "traces/anomaly_001.tr"}) {
    EXPECT_TRUE(sa.contains(name)) << name;
  }
  EXPECT_NE(sa.at("summary.txt").find("status=ok"), std::string::npos) << sa.at("summary.txt");
}

TEST(Experiment, DifferentSeedDifferentTopology) {
  ExperimentConfig cfg = tiny_config();
  const Topology a = build_topology(cfg);
  cfg.seed = 4;
  EXPECT_NE(a, build_topology(cfg));
}

TEST(Experiment, StagesByHandMatchChainedRun) {
  const ExperimentConfig cfg = tiny_config();
  const fs::path staged = fresh_dir("staged");
  const fs::path chained = fresh_dir("chained");
  stage_gen_topology(cfg, staged);
  stage_centrality(cfg, staged);
  stage_simulate(cfg, staged, true);
  stage_analyze(cfg, staged);
  run_experiment(cfg, chained);
  EXPECT_EQ(snapshot(staged), snapshot(chained));
}

TEST(Experiment, InMemoryMatchesFiles) {
  const ExperimentConfig cfg = tiny_config();
  const fs::path dir = fresh_dir("memory");
  const ExperimentReport on_disk = run_experiment(cfg, dir);
  const ExperimentReport in_memory = run_experiment_in_memory(cfg);
  EXPECT_EQ(summary_text(cfg, on_disk), summary_text(cfg, in_memory));
  EXPECT_EQ(summary_text(cfg, on_disk), slurp(dir / kSummaryFile));
  EXPECT_EQ(on_disk.primary_fraction().curve, in_memory.primary_fraction().curve);
}

TEST(Experiment, ReportIsConsistent) {
  const ExperimentConfig cfg = tiny_config();
  const ExperimentReport r = run_experiment_in_memory(cfg);
  EXPECT_EQ(r.num_nodes, 20u);
  EXPECT_EQ(r.baseline_runs, 2u);
  EXPECT_EQ(r.anomaly_runs, 2u);
  EXPECT_TRUE(r.baseline_audit.balanced());
  EXPECT_TRUE(r.anomaly_audit.balanced());
  EXPECT_GT(r.detections, 0u);
  ASSERT_EQ(r.fractions.size(), 2u);
  EXPECT_EQ(r.primary_fraction().fraction, 0.20);
  EXPECT_EQ(r.primary_fraction().ic_top.size(), 4u);
  EXPECT_EQ(r.fractions[0].ic_top.size(), 3u);
  for (const auto& f : r.fractions) {
    EXPECT_EQ(f.curve.front().t, 5 * kTicksPerSecond);
    EXPECT_EQ(f.curve.back().t, 12 * kTicksPerSecond);
    EXPECT_EQ(f.central_final_by_run.size(), 2u);
  }
}

TEST(Experiment, ReportedFractions) {
  ExperimentConfig cfg;
  EXPECT_EQ(reported_fractions(cfg), (std::vector<double>{0.15, 0.20}));
  cfg.central_fraction = 0.1;
  EXPECT_EQ(reported_fractions(cfg), (std::vector<double>{0.1, 0.15, 0.20}));
  EXPECT_EQ(fraction_label(0.15), "p15");
  EXPECT_EQ(fraction_label(0.2), "p20");
}

TEST(Experiment, AnomalyLeavesNormalFlowsAlone) {
  const ExperimentConfig cfg = tiny_config();
  const Topology t = build_topology(cfg);
  const auto plain = run_flows(t, cfg, 1, false);
  const auto with = run_flows(t, cfg, 1, true);
  ASSERT_GT(with.size(), plain.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    EXPECT_EQ(with[i].src, plain[i].src);
    EXPECT_EQ(with[i].start_at, plain[i].start_at);
    EXPECT_FALSE(with[i].anomalous);
  }
  EXPECT_TRUE(with.back().anomalous);
  EXPECT_NE(run_seed(cfg, 0), run_seed(cfg, 1));
}

TEST(Experiment, MissingInputsNamed) {
  const ExperimentConfig cfg = tiny_config();
  const fs::path dir = fresh_dir("missing");
  fs::create_directories(dir);
  try {
    stage_centrality(cfg, dir);
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("topology.txt"), std::string::npos) << e.what();
  }
  stage_gen_topology(cfg, dir);
  stage_centrality(cfg, dir);
  try {
    stage_analyze(cfg, dir);
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("baseline_000.tr"), std::string::npos) << e.what();
  }
}

TEST(Experiment, BaselineOnlyAnalysisNotesIt) {
  const ExperimentConfig cfg = tiny_config();
  const fs::path dir = fresh_dir("baseline_only");
  stage_gen_topology(cfg, dir);
  stage_centrality(cfg, dir);
  stage_simulate(cfg, dir, false);
  const ExperimentReport r = stage_analyze(cfg, dir);
  EXPECT_EQ(r.anomaly_runs, 0u);
  EXPECT_FALSE(fs::exists(dir / "detection.csv"));
  EXPECT_NE(slurp(dir / kSummaryFile).find("note=no anomaly runs"), std::string::npos);
}

TEST(Experiment, CorruptTraceReportsLine) {
  const ExperimentConfig cfg = tiny_config();
  const fs::path dir = fresh_dir("corrupt");
  run_experiment(cfg, dir);
  {
    std::ofstream out(trace_path(dir, 1, false), std::ios::app);
    out << "s 1 2 3 cbr\n";
  }
  try {
    stage_analyze(cfg, dir);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GT(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("baseline_001.tr"), std::string::npos) << e.what();
  }
}

TEST(Experiment, FailureLeavesMarkedSummary) {
  const ExperimentConfig cfg = tiny_config();
  const fs::path dir = fresh_dir("failure");
  fs::create_directories(dir);
  std::ofstream(dir / kTraceDir) << "in the way\n";
  EXPECT_ANY_THROW(run_experiment(cfg, dir));
  const std::string summary = slurp(dir / kSummaryFile);
  EXPECT_NE(summary.find("status=failed"), std::string::npos) << summary;
  EXPECT_NE(summary.find("failed_stage=simulate"), std::string::npos) << summary;
  EXPECT_NE(summary.find("note=partial artifacts: topology.txt centrality.csv"), std::string::npos)
      << summary;
}

TEST(CentralityCsv, RejectsBrokenFiles) {
  const char* bad[] = {
      "",
      "node,score\n",
      "node,information,betweenness,degree,rank_information\n0,1,0,1,1\n",
      "node,information,betweenness,degree,rank_information\n0,1,0,1,1\n1,1,0,1,1\n",
      "node,information,betweenness,degree,rank_information\n0,1,0,1,1\n5,1,0,1,2\n",
      "node,information,betweenness,degree,rank_information\n0,1,0,1,x\n1,1,0,1,2\n",
  };
  for (const char* text : bad) {
    std::stringstream in(text);
    EXPECT_THROW(read_centrality_ranking(in, 2), ParseError) << text;
  }
  std::stringstream ok("node,information,betweenness,degree,rank_information\n0,1,0,1,2\n1,2,0,1,1\n");
  EXPECT_EQ(read_centrality_ranking(ok, 2), (std::vector<NodeId>{1, 0}));
}

#ifdef CENTRINET_CLI
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CENTRINET_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string tiny_flags() {
  return "--preset desk --num-nodes 20 --radio-range-m 35 --sim-time-s 12 --num-runs 2 "
         "--num-connections 4 --anomaly-inject-time-s 5 --anomaly-size-bytes 20000 --seed 3 "
         "--quiet";
}

}  // namespace

TEST(Cli, StagesWithoutAnomaly) {
  const fs::path dir = fresh_dir("cli");
  const std::string common = tiny_flags() + " --out " + dir.string();
  ASSERT_EQ(run_cli("gen-topology " + common), 0);
  ASSERT_EQ(run_cli("centrality " + common), 0);
  ASSERT_EQ(run_cli("simulate --anomaly=off " + common), 0);
  EXPECT_TRUE(fs::exists(trace_path(dir, 1, false)));
  EXPECT_FALSE(fs::exists(trace_path(dir, 0, true)));
  ASSERT_EQ(run_cli("analyze " + common), 0);
  EXPECT_NE(slurp(dir / kSummaryFile).find("note=no anomaly runs"), std::string::npos);
}

TEST(Cli, ExperimentMatchesLibrary) {
  const fs::path cli_dir = fresh_dir("cli_exp");
  const fs::path lib_dir = fresh_dir("lib_exp");
  ASSERT_EQ(run_cli("experiment " + tiny_flags() + " --jobs 2 --out " + cli_dir.string()), 0);
  run_experiment(tiny_config(), lib_dir);
  EXPECT_EQ(snapshot(cli_dir), snapshot(lib_dir));
}

TEST(Cli, ExitCodes) {
  const fs::path dir = fresh_dir("cli_err");
  EXPECT_EQ(run_cli("experiment --central-fraction 1.5 --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("centrality --quiet --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("experiment --config " + (dir / "absent.conf").string()), 2);
  EXPECT_NE(run_cli("no-such-command"), 0);
}
#endif
