#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "centrinet/centrality.hpp"
#include "centrinet/config.hpp"
#include "centrinet/graph.hpp"
#include "centrinet/metrics.hpp"
#include "centrinet/simulation.hpp"
#include "centrinet/traffic.hpp"

namespace centrinet {

/// The topology shared by every run of an experiment.
Topology build_topology(const ExperimentConfig& cfg);
AdmissionPolicy admission_policy(const ExperimentConfig& cfg);
SimulationParams simulation_params(const ExperimentConfig& cfg);
std::uint64_t run_seed(const ExperimentConfig& cfg, std::size_t run);

/// Normal flows of a run, plus the anomalous ones when `anomaly` is set. The
/// normal flows are identical with and without the anomaly.
std::vector<Flow> run_flows(const Topology& t, const ExperimentConfig& cfg, std::size_t run,
                            bool anomaly);
AnomalyPlan run_anomaly_plan(const Topology& t, const ExperimentConfig& cfg, std::size_t run);

/// Central fractions reported for every experiment: 0.15, 0.20 and the
/// configured one, ascending and without duplicates.
std::vector<double> reported_fractions(const ExperimentConfig& cfg);

/// Suffix such as "p15" naming a fraction in file and key names.
std::string fraction_label(double fraction);

/// What the analysis keeps from one run.
struct RunOutcome {
  std::size_t run = 0;
  bool anomaly = false;
  /// cbr arrivals before the injection time.
  ArrivalStats arrivals;
  TraceAudit audit;
  std::vector<DetectionRecord> detections;
  /// Present when the run was simulated rather than read back from a trace.
  std::optional<SimulationResult> simulation;
};

/// Simulates one run. When `trace_file` is given the full trace is written there.
RunOutcome simulate_run(const Topology& t, const ExperimentConfig& cfg, std::size_t run,
                        bool anomaly, const std::optional<std::filesystem::path>& trace_file);

/// Rebuilds the outcome of one run from its trace file.
RunOutcome analyze_trace_file(const std::filesystem::path& trace_file, std::size_t n,
                              const ExperimentConfig& cfg, std::size_t run, bool anomaly);

struct FractionOutcome {
  double fraction = 0.0;
  std::vector<NodeId> ic_top;
  std::vector<NodeId> empirical_top;
  double agreement = 0.0;
  /// Empty when no anomaly runs were analyzed.
  DetectionCurve curve;
  std::vector<double> central_final_by_run;
  std::vector<double> noncentral_final_by_run;

  double central_final() const { return curve.empty() ? 0.0 : curve.back().central; }
  double noncentral_final() const { return curve.empty() ? 0.0 : curve.back().noncentral; }
};

struct ExperimentReport {
  std::size_t num_nodes = 0;
  std::size_t edges = 0;
  std::size_t baseline_runs = 0;
  std::size_t anomaly_runs = 0;
  ArrivalStats arrivals;
  TraceAudit baseline_audit;
  TraceAudit anomaly_audit;
  std::uint64_t detections = 0;
  std::vector<FractionOutcome> fractions;
  /// Index into `fractions` of the configured central fraction.
  std::size_t primary = 0;

  const FractionOutcome& primary_fraction() const { return fractions.at(primary); }
};

/// Combines per-run outcomes (in run order) with the information-centrality
/// ranking (descending) into the experiment report.
ExperimentReport assemble_report(const ExperimentConfig& cfg, const Topology& t,
                                 const std::vector<NodeId>& ic_ranking,
                                 const std::vector<RunOutcome>& baseline,
                                 const std::vector<RunOutcome>& anomalous);

Summary make_summary(const ExperimentConfig& cfg, const ExperimentReport& report);

struct RunOptions {
  /// Concurrent runs; results never depend on it.
  unsigned jobs = 1;
  std::function<void(const std::string&)> progress;
};

/// Runs `count` jobs (indices 0..count-1) on up to `jobs` threads and returns
/// the results in index order. The first exception thrown is rethrown.
std::vector<RunOutcome> parallel_runs(std::size_t count, unsigned jobs,
                                      const std::function<RunOutcome(std::size_t)>& job);

/// The whole pipeline without touching the disk.
ExperimentReport run_experiment_in_memory(const ExperimentConfig& cfg, const RunOptions& opts = {});

// File-based stages. Each reads the previous stage's files from `dir` and
// throws UsageError naming any missing input.

inline constexpr const char* kTopologyFile = "topology.txt";
inline constexpr const char* kCentralityFile = "centrality.csv";
inline constexpr const char* kConfigFile = "config.txt";
inline constexpr const char* kRankingFile = "ranking.csv";
inline constexpr const char* kSummaryFile = "summary.txt";
inline constexpr const char* kTraceDir = "traces";

std::filesystem::path trace_path(const std::filesystem::path& dir, std::size_t run, bool anomaly);
std::filesystem::path detection_path(const std::filesystem::path& dir, double fraction,
                                     bool primary);

void stage_gen_topology(const ExperimentConfig& cfg, const std::filesystem::path& dir);
void stage_centrality(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                      const RunOptions& opts = {});
void stage_simulate(const ExperimentConfig& cfg, const std::filesystem::path& dir, bool anomaly,
                    const RunOptions& opts = {});
ExperimentReport stage_analyze(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                               const RunOptions& opts = {});

/// All stages in order. On failure writes a summary marked failed that lists
/// the artifacts already present, then rethrows.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                                const RunOptions& opts = {});

/// Information ranking (descending) stored in a centrality CSV.
std::vector<NodeId> read_centrality_ranking(std::istream& in, std::size_t n);

}  // namespace centrinet
