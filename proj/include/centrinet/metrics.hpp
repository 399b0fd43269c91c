#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "centrinet/centrality.hpp"
#include "centrinet/graph.hpp"
#include "centrinet/trace.hpp"
#include "centrinet/traffic.hpp"

namespace centrinet {

struct NodeArrival {
  /// Sum of (arrival time - creation time) in ticks.
  std::uint64_t total_latency = 0;
  std::uint64_t count = 0;

  double mean() const {
    return count == 0 ? 0.0 : static_cast<double>(total_latency) / static_cast<double>(count);
  }
};

/// Per-node source-to-node latency of normal data packets.
struct ArrivalStats {
  std::vector<NodeArrival> nodes;

  /// Pooling two sets of runs is plain summation.
  ArrivalStats& operator+=(const ArrivalStats& other);
};

/// Streams trace events into ArrivalStats. Only `cbr` packets count, on their
/// `r` and `f` events; creation times come from the matching `s` line. Call
/// start_run() before each trace because packet ids restart per run.
class ArrivalAccumulator final : public TraceSink {
 public:
  /// Events at or after `cutoff` are ignored when one is given.
  explicit ArrivalAccumulator(std::size_t n, std::optional<SimTime> cutoff = std::nullopt);

  void start_run() { created_.clear(); }
  void record(const TraceEvent& e) override;
  const ArrivalStats& stats() const noexcept { return stats_; }

 private:
  ArrivalStats stats_;
  std::optional<SimTime> cutoff_;
  std::unordered_map<std::uint64_t, SimTime> created_;
};

/// Each inner vector is one run's trace.
ArrivalStats arrival_stats(std::size_t n, const std::vector<std::vector<TraceEvent>>& runs,
                           std::optional<SimTime> cutoff = std::nullopt);

/// Nodes with traffic, ascending mean latency, ties by ascending NodeId.
std::vector<NodeId> arrival_order(const ArrivalStats& stats);

/// First ceil(fraction * ranked) nodes of arrival_order.
std::vector<NodeId> empirical_ranking(const ArrivalStats& stats, double fraction);

/// Jaccard index |a & b| / |a | b|; two empty sets agree fully.
double ranking_agreement(const std::vector<NodeId>& a, const std::vector<NodeId>& b);

/// Replays `r`/`f` data events through a fresh threshold detector.
std::vector<DetectionRecord> detections_from_trace(std::size_t n, std::uint64_t threshold,
                                                   const std::vector<TraceEvent>& events);

inline constexpr SimTime kCurveStep = 100 * kTicksPerMs;

struct DetectionSample {
  SimTime t = 0;
  double central = 0.0;
  double noncentral = 0.0;

  friend bool operator==(const DetectionSample&, const DetectionSample&) = default;
};

using DetectionCurve = std::vector<DetectionSample>;

/// Fraction of central and non-central nodes holding a record with
/// first_detect_at <= t, sampled every 100 ms from inject_at through t_end.
DetectionCurve detection_curves(const std::vector<DetectionRecord>& records,
                                const std::vector<NodeId>& central, std::size_t n,
                                SimTime inject_at, SimTime t_end);

/// Pointwise mean of curves sampled at identical times.
DetectionCurve average_curves(const std::vector<DetectionCurve>& curves);

/// Data-packet bookkeeping reconstructed from one trace.
struct TraceAudit {
  std::uint64_t sends = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t drops = 0;        // IFQ and NRTE
  std::uint64_t end_drops = 0;    // still in flight at the end
  std::uint64_t unresolved = 0;   // sent but never delivered or dropped
  std::uint64_t looped_packets = 0;
  std::uint64_t orphan_events = 0;     // data events before the packet's `s`
  std::uint64_t time_regressions = 0;  // lines earlier than their predecessor
  std::uint64_t double_closures = 0;   // events after a packet's `r` or `d`

  /// sends = deliveries + drops + in-flight, with every packet closed once.
  bool balanced() const {
    return unresolved == 0 && orphan_events == 0 && double_closures == 0 &&
           sends == deliveries + drops + end_drops;
  }
};

/// Streaming form of audit_trace; memory grows with packets still open.
class TraceAuditor final : public TraceSink {
 public:
  void record(const TraceEvent& e) override;
  /// Counts so far, with every still-open packet reported as unresolved.
  TraceAudit result() const;

 private:
  TraceAudit audit_;
  std::unordered_map<std::uint64_t, std::vector<NodeId>> open_;
  std::vector<bool> closed_;  // indexed by packet id, which is dense per run
  std::unordered_set<std::uint64_t> looped_;
  SimTime last_ = 0;
};

TraceAudit audit_trace(const std::vector<TraceEvent>& events);

TraceAudit& operator+=(TraceAudit& a, const TraceAudit& b);

void write_ranking_csv(const ArrivalStats& stats, std::ostream& out);
void write_detection_csv(const DetectionCurve& curve, std::ostream& out);
void write_centrality_csv(const CentralityReport& report, std::ostream& out);

/// Ordered key=value summary.
class Summary {
 public:
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  void set(const std::string& key, double value);
  void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }
  void set(const std::string& key, int value) { set(key, std::to_string(value)); }
  void note(const std::string& text) { notes_.push_back(text); }

  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
  void write(std::ostream& out) const;

 private:
  std::map<std::string, std::string> entries_;
  std::vector<std::string> notes_;
};

std::string format_fraction(double v);

}  // namespace centrinet
