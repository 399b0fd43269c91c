#include "centrinet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "centrinet/errors.hpp"
#include "centrinet/rng.hpp"
#include "centrinet/trace.hpp"

namespace centrinet {

namespace fs = std::filesystem;

Topology build_topology(const ExperimentConfig& cfg) {
  return connected_unit_disk(cfg.num_nodes, cfg.area_width_m, cfg.area_height_m,
                             cfg.radio_range_m, derive_seed(cfg.seed, "topology"));
}

AdmissionPolicy admission_policy(const ExperimentConfig& cfg) {
  AdmissionPolicy p;
  p.max_paths = cfg.ic_k_paths;
  p.length_slack = cfg.ic_len_slack;
  return p;
}

SimulationParams simulation_params(const ExperimentConfig& cfg) {
  SimulationParams p;
  p.duration = seconds_to_ticks(cfg.sim_time_s);
  p.queue_capacity = cfg.queue_capacity;
  p.bandwidth_bps = cfg.bandwidth_bps;
  p.per_hop_latency = static_cast<SimTime>(std::llround(cfg.per_hop_latency_ms * 1000.0));
  const double threshold =
      cfg.detector_threshold_factor * static_cast<double>(cfg.packet_size_bytes);
  p.detection_threshold = static_cast<std::uint64_t>(std::ceil(threshold - 1e-9));
  return p;
}

std::uint64_t run_seed(const ExperimentConfig& cfg, std::size_t run) {
  return derive_seed(cfg.seed, "run", run);
}

AnomalyPlan run_anomaly_plan(const Topology& t, const ExperimentConfig& cfg, std::size_t run) {
  AnomalyConfig a;
  a.origin_fraction = cfg.anomaly_origin_fraction;
  a.anomaly_size = cfg.anomaly_size_bytes;
  a.inject_at = seconds_to_ticks(cfg.anomaly_inject_time_s);
  a.stop_at = seconds_to_ticks(cfg.sim_time_s);
  a.rate_per_ms = cfg.packet_rate_per_ms;
  return build_anomaly_plan(t, a, run_seed(cfg, run));
}

std::vector<Flow> run_flows(const Topology& t, const ExperimentConfig& cfg, std::size_t run,
                            bool anomaly) {
  TrafficParams tp;
  tp.rate_per_ms = cfg.packet_rate_per_ms;
  tp.packet_size = cfg.packet_size_bytes;
  tp.stop_at = seconds_to_ticks(cfg.sim_time_s);
  tp.stagger = std::min(kTicksPerSecond, tp.stop_at);
  std::vector<Flow> flows = spawn_flows(t, cfg.num_connections, tp, run_seed(cfg, run));
  if (anomaly) {
    const auto first = static_cast<std::uint32_t>(flows.size());
    for (Flow& f : run_anomaly_plan(t, cfg, run).flows(first)) flows.push_back(f);
  }
  return flows;
}

std::vector<double> reported_fractions(const ExperimentConfig& cfg) {
  std::vector<double> f = {0.15, 0.20, cfg.central_fraction};
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  return f;
}

std::string fraction_label(double fraction) {
  const double pct = fraction * 100.0;
  char buf[32];
  if (std::abs(pct - std::round(pct)) < 1e-9) {
    std::snprintf(buf, sizeof buf, "p%lld", std::llround(pct));
  } else {
    std::snprintf(buf, sizeof buf, "p%g", pct);
    for (char* c = buf; *c; ++c) {
      if (*c == '.') *c = '_';
    }
  }
  return buf;
}

namespace {

/// Replays data arrivals through a detector, as the simulator does live.
class DetectionReplay final : public TraceSink {
 public:
  DetectionReplay(std::size_t n, std::uint64_t threshold) : detector_(n, threshold) {}
  void record(const TraceEvent& e) override {
    if (!is_data(e.ptype)) return;
    if (e.evt != TraceKind::kReceive && e.evt != TraceKind::kForward) return;
    detector_.observe(e.node, e.pkt_id, e.size, e.time);
  }
  const std::vector<DetectionRecord>& records() const { return detector_.records(); }

 private:
  ThresholdDetector detector_;
};

std::optional<SimTime> arrival_cutoff(const ExperimentConfig& cfg) {
  return seconds_to_ticks(cfg.anomaly_inject_time_s);
}

std::ofstream open_output(const fs::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

std::ifstream open_input(const fs::path& file) {
  if (!fs::exists(file)) throw UsageError("missing input artifact: " + file.string());
  std::ifstream in(file, std::ios::binary);
  if (!in) throw UsageError("cannot read input artifact: " + file.string());
  return in;
}

template <typename Writer>
void write_file(const fs::path& file, Writer&& writer) {
  std::ofstream out = open_output(file);
  writer(out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

Topology read_topology_file(const fs::path& dir) {
  std::ifstream in = open_input(dir / kTopologyFile);
  return load_topology(in);
}

void write_config_file(const ExperimentConfig& cfg, const fs::path& dir) {
  write_file(dir / kConfigFile, [&](std::ostream& out) { out << to_config_text(cfg); });
}

void report_progress(const RunOptions& opts, const std::string& message) {
  if (opts.progress) opts.progress(message);
}

std::string join_ids(const std::vector<NodeId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i]);
  }
  return out;
}

}  // namespace

RunOutcome simulate_run(const Topology& t, const ExperimentConfig& cfg, std::size_t run,
                        bool anomaly, const std::optional<fs::path>& trace_file) {
  RunOutcome outcome;
  outcome.run = run;
  outcome.anomaly = anomaly;

  ArrivalAccumulator arrivals(t.size(), arrival_cutoff(cfg));
  TraceAuditor auditor;
  TraceFanout fanout;
  fanout.add(arrivals);
  fanout.add(auditor);
  std::optional<std::ofstream> file;
  std::optional<TraceWriter> writer;
  if (trace_file) {
    file.emplace(open_output(*trace_file));
    writer.emplace(*file);
    fanout.add(*writer);
  }

  Simulation sim(t, simulation_params(cfg), run_flows(t, cfg, run, anomaly), fanout);
  SimulationResult result = sim.run();
  if (file) {
    file->flush();
    if (!*file) throw std::runtime_error("failed writing " + trace_file->string());
  }
  outcome.arrivals = arrivals.stats();
  outcome.audit = auditor.result();
  outcome.detections = result.detections;
  outcome.simulation = std::move(result);
  return outcome;
}

RunOutcome analyze_trace_file(const fs::path& trace_file, std::size_t n,
                              const ExperimentConfig& cfg, std::size_t run, bool anomaly) {
  RunOutcome outcome;
  outcome.run = run;
  outcome.anomaly = anomaly;
  ArrivalAccumulator arrivals(n, arrival_cutoff(cfg));
  TraceAuditor auditor;
  DetectionReplay detections(n, simulation_params(cfg).detection_threshold);
  std::ifstream in = open_input(trace_file);
  try {
    read_trace(in, [&](const TraceEvent& e) {
      arrivals.record(e);
      auditor.record(e);
      detections.record(e);
    });
  } catch (const ParseError& e) {
    throw ParseError(e.line(), trace_file.string() + ": " + e.what());
  }
  outcome.arrivals = arrivals.stats();
  outcome.audit = auditor.result();
  outcome.detections = detections.records();
  return outcome;
}

std::vector<RunOutcome> parallel_runs(std::size_t count, unsigned jobs,
                                      const std::function<RunOutcome(std::size_t)>& job) {
  std::vector<std::optional<RunOutcome>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        slots[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1u, jobs));
  if (threads == 1 || count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(threads, count); ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<RunOutcome> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

ExperimentReport assemble_report(const ExperimentConfig& cfg, const Topology& t,
                                 const std::vector<NodeId>& ic_ranking,
                                 const std::vector<RunOutcome>& baseline,
                                 const std::vector<RunOutcome>& anomalous) {
  const std::size_t n = t.size();
  if (ic_ranking.size() != n) throw UsageError("centrality ranking does not match the topology");

  ExperimentReport report;
  report.num_nodes = n;
  report.edges = t.edge_count();
  report.baseline_runs = baseline.size();
  report.anomaly_runs = anomalous.size();
  report.arrivals.nodes.resize(n);
  for (const RunOutcome& r : baseline) {
    report.arrivals += r.arrivals;
    report.baseline_audit += r.audit;
  }
  for (const RunOutcome& r : anomalous) {
    report.anomaly_audit += r.audit;
    report.detections += r.detections.size();
  }

  const SimTime inject_at = seconds_to_ticks(cfg.anomaly_inject_time_s);
  const SimTime t_end = seconds_to_ticks(cfg.sim_time_s);
  const bool ranked = !arrival_order(report.arrivals).empty();
  const std::vector<double> fractions = reported_fractions(cfg);
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    FractionOutcome f;
    f.fraction = fractions[i];
    f.ic_top.assign(ic_ranking.begin(),
                    ic_ranking.begin() + static_cast<std::ptrdiff_t>(fraction_count(f.fraction, n)));
    if (ranked) f.empirical_top = empirical_ranking(report.arrivals, f.fraction);
    f.agreement = ranking_agreement(f.ic_top, f.empirical_top);
    std::vector<DetectionCurve> curves;
    for (const RunOutcome& r : anomalous) {
      curves.push_back(detection_curves(r.detections, f.ic_top, n, inject_at, t_end));
      f.central_final_by_run.push_back(curves.back().empty() ? 0.0 : curves.back().back().central);
      f.noncentral_final_by_run.push_back(curves.back().empty() ? 0.0
                                                                : curves.back().back().noncentral);
    }
    f.curve = average_curves(curves);
    if (f.fraction == cfg.central_fraction) report.primary = i;
    report.fractions.push_back(std::move(f));
  }
  return report;
}

Summary make_summary(const ExperimentConfig& cfg, const ExperimentReport& report) {
  Summary s;
  s.set("status", std::string("ok"));
  s.set("preset", cfg.preset);
  s.set("seed", std::uint64_t{cfg.seed});
  s.set("num_nodes", std::uint64_t{report.num_nodes});
  s.set("edges", std::uint64_t{report.edges});
  s.set("baseline_runs", std::uint64_t{report.baseline_runs});
  s.set("anomaly_runs", std::uint64_t{report.anomaly_runs});
  s.set("ranked_nodes", std::uint64_t{arrival_order(report.arrivals).size()});
  s.set("central_fraction", cfg.central_fraction);

  const auto audit_keys = [&](const std::string& prefix, const TraceAudit& a) {
    s.set(prefix + "_sends", a.sends);
    s.set(prefix + "_deliveries", a.deliveries);
    s.set(prefix + "_drops", a.drops);
    s.set(prefix + "_in_flight_at_end", a.end_drops);
    s.set(prefix + "_looped_packets", a.looped_packets);
  };
  audit_keys("baseline", report.baseline_audit);
  if (report.anomaly_runs > 0) audit_keys("anomaly", report.anomaly_audit);
  const bool balanced = report.baseline_audit.balanced() && report.anomaly_audit.balanced();
  s.set("accounting", std::string(balanced ? "balanced" : "unbalanced"));
  s.set("detections", report.detections);

  for (const FractionOutcome& f : report.fractions) {
    const std::string label = "_" + fraction_label(f.fraction);
    s.set("ic_top" + label, join_ids(f.ic_top));
    s.set("empirical_top" + label, join_ids(f.empirical_top));
    s.set("agreement_jaccard" + label, f.agreement);
    if (report.anomaly_runs > 0) {
      s.set("central_final" + label, f.central_final());
      s.set("noncentral_final" + label, f.noncentral_final());
    }
  }
  const FractionOutcome& primary = report.primary_fraction();
  s.set("agreement_jaccard", primary.agreement);
  if (report.anomaly_runs > 0) {
    s.set("central_final", primary.central_final());
    s.set("noncentral_final", primary.noncentral_final());
  }

  if (report.anomaly_runs == 0) s.note("no anomaly runs");
  if (report.anomaly_runs > 0 && report.detections == 0) s.note("no detections");
  if (arrival_order(report.arrivals).empty()) s.note("no ranked nodes");
  return s;
}

ExperimentReport run_experiment_in_memory(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate(cfg);
  const Topology t = build_topology(cfg);
  const CentralityReport centrality = analyze_centrality(t, admission_policy(cfg), opts.jobs);
  auto runs = [&](bool anomaly) {
    return parallel_runs(cfg.num_runs, opts.jobs, [&](std::size_t run) {
      RunOutcome r = simulate_run(t, cfg, run, anomaly, std::nullopt);
      report_progress(opts, std::string(anomaly ? "anomaly" : "baseline") + " run " +
                                std::to_string(run + 1) + "/" + std::to_string(cfg.num_runs));
      return r;
    });
  };
  const std::vector<RunOutcome> baseline = runs(false);
  const std::vector<RunOutcome> anomalous = runs(true);
  return assemble_report(cfg, t, centrality.rank_information, baseline, anomalous);
}

fs::path trace_path(const fs::path& dir, std::size_t run, bool anomaly) {
  char name[64];
  std::snprintf(name, sizeof name, "%s_%03zu.tr", anomaly ? "anomaly" : "baseline", run);
  return dir / kTraceDir / name;
}

fs::path detection_path(const fs::path& dir, double fraction, bool primary) {
  if (primary) return dir / "detection.csv";
  return dir / ("detection_" + fraction_label(fraction) + ".csv");
}

void stage_gen_topology(const ExperimentConfig& cfg, const fs::path& dir) {
  validate(cfg);
  fs::create_directories(dir);
  const Topology t = build_topology(cfg);
  write_file(dir / kTopologyFile, [&](std::ostream& out) { save_topology(t, out); });
  write_config_file(cfg, dir);
}

void stage_centrality(const ExperimentConfig& cfg, const fs::path& dir, const RunOptions& opts) {
  validate(cfg);
  const Topology t = read_topology_file(dir);
  const CentralityReport report = analyze_centrality(t, admission_policy(cfg), opts.jobs);
  write_file(dir / kCentralityFile, [&](std::ostream& out) { write_centrality_csv(report, out); });
  write_config_file(cfg, dir);
}

void stage_simulate(const ExperimentConfig& cfg, const fs::path& dir, bool anomaly,
                    const RunOptions& opts) {
  validate(cfg);
  const Topology t = read_topology_file(dir);
  fs::create_directories(dir / kTraceDir);
  auto runs = [&](bool with_anomaly) {
    parallel_runs(cfg.num_runs, opts.jobs, [&](std::size_t run) {
      RunOutcome r = simulate_run(t, cfg, run, with_anomaly, trace_path(dir, run, with_anomaly));
      report_progress(opts, std::string(with_anomaly ? "anomaly" : "baseline") + " run " +
                                std::to_string(run + 1) + "/" + std::to_string(cfg.num_runs));
      r.simulation.reset();
      return r;
    });
  };
  runs(false);
  if (anomaly) runs(true);
  write_config_file(cfg, dir);
}

std::vector<NodeId> read_centrality_ranking(std::istream& in, std::size_t n) {
  std::string line;
  if (!std::getline(in, line) || line != "node,information,betweenness,degree,rank_information") {
    throw ParseError(1, "unexpected centrality CSV header");
  }
  std::vector<NodeId> by_rank(n, 0);
  std::vector<char> seen_node(n, 0);
  std::vector<char> seen_rank(n, 0);
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw ParseError(line_no, "expected 5 columns");
    unsigned long long node = 0;
    unsigned long long rank = 0;
    try {
      std::size_t used = 0;
      node = std::stoull(cells[0], &used);
      if (used != cells[0].size()) throw std::invalid_argument("node");
      rank = std::stoull(cells[4], &used);
      if (used != cells[4].size()) throw std::invalid_argument("rank");
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad node or rank");
    }
    if (node >= n || rank < 1 || rank > n) throw ParseError(line_no, "node or rank out of range");
    if (seen_node[node] || seen_rank[rank - 1]) throw ParseError(line_no, "duplicate node or rank");
    seen_node[node] = seen_rank[rank - 1] = 1;
    by_rank[rank - 1] = static_cast<NodeId>(node);
    ++rows;
  }
  if (rows != n) {
    throw ParseError(line_no, "expected " + std::to_string(n) + " rows, found " +
                                  std::to_string(rows));
  }
  return by_rank;
}

ExperimentReport stage_analyze(const ExperimentConfig& cfg, const fs::path& dir,
                               const RunOptions& opts) {
  validate(cfg);
  const Topology t = read_topology_file(dir);
  std::vector<NodeId> ranking;
  {
    std::ifstream in = open_input(dir / kCentralityFile);
    try {
      ranking = read_centrality_ranking(in, t.size());
    } catch (const ParseError& e) {
      throw ParseError(e.line(), (dir / kCentralityFile).string() + ": " + e.what());
    }
  }
  for (std::size_t run = 0; run < cfg.num_runs; ++run) {
    if (!fs::exists(trace_path(dir, run, false))) {
      throw UsageError("missing input artifact: " + trace_path(dir, run, false).string());
    }
  }
  std::size_t anomaly_files = 0;
  for (std::size_t run = 0; run < cfg.num_runs; ++run) {
    anomaly_files += fs::exists(trace_path(dir, run, true)) ? 1 : 0;
  }
  if (anomaly_files != 0 && anomaly_files != cfg.num_runs) {
    for (std::size_t run = 0; run < cfg.num_runs; ++run) {
      if (!fs::exists(trace_path(dir, run, true))) {
        throw UsageError("missing input artifact: " + trace_path(dir, run, true).string());
      }
    }
  }

  auto analyze = [&](bool anomaly) {
    return parallel_runs(cfg.num_runs, opts.jobs, [&](std::size_t run) {
      return analyze_trace_file(trace_path(dir, run, anomaly), t.size(), cfg, run, anomaly);
    });
  };
  const std::vector<RunOutcome> baseline = analyze(false);
  const std::vector<RunOutcome> anomalous =
      anomaly_files ? analyze(true) : std::vector<RunOutcome>{};
  ExperimentReport report = assemble_report(cfg, t, ranking, baseline, anomalous);

  write_file(dir / kRankingFile,
             [&](std::ostream& out) { write_ranking_csv(report.arrivals, out); });
  if (report.anomaly_runs > 0) {
    for (std::size_t i = 0; i < report.fractions.size(); ++i) {
      const FractionOutcome& f = report.fractions[i];
      write_file(detection_path(dir, f.fraction, false),
                 [&](std::ostream& out) { write_detection_csv(f.curve, out); });
      if (i == report.primary) {
        write_file(detection_path(dir, f.fraction, true),
                   [&](std::ostream& out) { write_detection_csv(f.curve, out); });
      }
    }
  }
  const Summary summary = make_summary(cfg, report);
  write_file(dir / kSummaryFile, [&](std::ostream& out) { summary.write(out); });
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const fs::path& dir,
                                const RunOptions& opts) {
  validate(cfg);
  fs::create_directories(dir);
  std::string stage = "gen-topology";
  try {
    stage_gen_topology(cfg, dir);
    stage = "centrality";
    stage_centrality(cfg, dir, opts);
    stage = "simulate";
    stage_simulate(cfg, dir, true, opts);
    stage = "analyze";
    return stage_analyze(cfg, dir, opts);
  } catch (const std::exception& e) {
    Summary failed;
    failed.set("status", std::string("failed"));
    failed.set("failed_stage", stage);
    failed.set("error", std::string(e.what()));
    std::vector<std::string> present;
    for (const char* name : {kTopologyFile, kCentralityFile, kRankingFile}) {
      if (fs::exists(dir / name)) present.emplace_back(name);
    }
    if (fs::exists(dir / kTraceDir)) present.emplace_back(kTraceDir);
    std::string listed;
    for (const auto& p : present) listed += (listed.empty() ? "" : " ") + p;
    failed.note("partial artifacts: " + (listed.empty() ? std::string("none") : listed));
    try {
      write_file(dir / kSummaryFile, [&](std::ostream& out) { failed.write(out); });
    } catch (const std::exception&) {
      // The original failure matters more than the summary.
    }
    throw;
  }
}

}  // namespace centrinet
