#include "centrinet/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>

#include "centrinet/centrality.hpp"
#include "centrinet/errors.hpp"

namespace centrinet {

namespace {
__extension__ using u128 = unsigned __int128;
}  // namespace

ArrivalStats& ArrivalStats::operator+=(const ArrivalStats& other) {
  if (nodes.size() < other.nodes.size()) nodes.resize(other.nodes.size());
  for (std::size_t v = 0; v < other.nodes.size(); ++v) {
    nodes[v].total_latency += other.nodes[v].total_latency;
    nodes[v].count += other.nodes[v].count;
  }
  return *this;
}

ArrivalAccumulator::ArrivalAccumulator(std::size_t n, std::optional<SimTime> cutoff)
    : cutoff_(cutoff) {
  stats_.nodes.resize(n);
}

void ArrivalAccumulator::record(const TraceEvent& e) {
  if (e.ptype != PacketType::kCbr) return;
  if (cutoff_ && e.time >= *cutoff_) return;
  switch (e.evt) {
    case TraceKind::kSend:
      created_[e.pkt_id] = e.time;
      break;
    case TraceKind::kForward:
    case TraceKind::kReceive: {
      auto it = created_.find(e.pkt_id);
      if (it == created_.end()) {
        throw std::runtime_error("arrival of packet " + std::to_string(e.pkt_id) +
                                 " without a send");
      }
      if (e.node >= stats_.nodes.size()) throw UsageError("trace node outside the topology");
      NodeArrival& a = stats_.nodes[e.node];
      a.total_latency += e.time - it->second;
      ++a.count;
      if (e.evt == TraceKind::kReceive) created_.erase(it);
      break;
    }
    case TraceKind::kDrop:
      created_.erase(e.pkt_id);
      break;
  }
}

ArrivalStats arrival_stats(std::size_t n, const std::vector<std::vector<TraceEvent>>& runs,
                           std::optional<SimTime> cutoff) {
  ArrivalAccumulator acc(n, cutoff);
  for (const auto& run : runs) {
    acc.start_run();
    for (const TraceEvent& e : run) acc.record(e);
  }
  return acc.stats();
}

std::vector<NodeId> arrival_order(const ArrivalStats& stats) {
  std::vector<NodeId> ranked;
  for (NodeId v = 0; v < stats.nodes.size(); ++v) {
    if (stats.nodes[v].count > 0) ranked.push_back(v);
  }
  // Compare means exactly: a/b < c/d  <=>  a*d < c*b.
  std::stable_sort(ranked.begin(), ranked.end(), [&](NodeId a, NodeId b) {
    const NodeArrival& x = stats.nodes[a];
    const NodeArrival& y = stats.nodes[b];
    return static_cast<u128>(x.total_latency) * y.count <
           static_cast<u128>(y.total_latency) * x.count;
  });
  return ranked;
}

std::vector<NodeId> empirical_ranking(const ArrivalStats& stats, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw UsageError("fraction must lie in (0, 1]");
  std::vector<NodeId> ranked = arrival_order(stats);
  if (ranked.empty()) return ranked;
  ranked.resize(fraction_count(fraction, ranked.size()));
  return ranked;
}

double ranking_agreement(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  const std::set<NodeId> sa(a.begin(), a.end());
  const std::set<NodeId> sb(b.begin(), b.end());
  std::size_t common = 0;
  for (NodeId v : sa) common += sb.count(v);
  const std::size_t unite = sa.size() + sb.size() - common;
  if (unite == 0) return 1.0;
  return static_cast<double>(common) / static_cast<double>(unite);
}

std::vector<DetectionRecord> detections_from_trace(std::size_t n, std::uint64_t threshold,
                                                   const std::vector<TraceEvent>& events) {
  ThresholdDetector detector(n, threshold);
  for (const TraceEvent& e : events) {
    if (!is_data(e.ptype)) continue;
    if (e.evt != TraceKind::kReceive && e.evt != TraceKind::kForward) continue;
    detector.observe(e.node, e.pkt_id, e.size, e.time);
  }
  return detector.records();
}

DetectionCurve detection_curves(const std::vector<DetectionRecord>& records,
                                const std::vector<NodeId>& central, std::size_t n,
                                SimTime inject_at, SimTime t_end) {
  std::vector<char> is_central(n, 0);
  for (NodeId v : central) {
    if (v >= n) throw UsageError("central node outside the topology");
    is_central[v] = 1;
  }
  const auto central_count = static_cast<std::size_t>(std::count(is_central.begin(), is_central.end(), 1));
  const std::size_t other_count = n - central_count;

  std::vector<SimTime> first(n, std::numeric_limits<SimTime>::max());
  for (const DetectionRecord& r : records) {
    if (r.node >= n) throw UsageError("detection record outside the topology");
    first[r.node] = std::min(first[r.node], r.first_detect_at);
  }
  // Detection times sorted per group; a sweep then counts records <= t.
  std::vector<SimTime> central_times;
  std::vector<SimTime> other_times;
  for (NodeId v = 0; v < n; ++v) {
    if (first[v] == std::numeric_limits<SimTime>::max()) continue;
    (is_central[v] ? central_times : other_times).push_back(first[v]);
  }
  std::sort(central_times.begin(), central_times.end());
  std::sort(other_times.begin(), other_times.end());

  DetectionCurve curve;
  std::size_t ci = 0;
  std::size_t oi = 0;
  for (SimTime t = inject_at; t <= t_end; t += kCurveStep) {
    while (ci < central_times.size() && central_times[ci] <= t) ++ci;
    while (oi < other_times.size() && other_times[oi] <= t) ++oi;
    DetectionSample s;
    s.t = t;
    s.central = central_count ? static_cast<double>(ci) / static_cast<double>(central_count) : 0.0;
    s.noncentral = other_count ? static_cast<double>(oi) / static_cast<double>(other_count) : 0.0;
    curve.push_back(s);
  }
  return curve;
}

DetectionCurve average_curves(const std::vector<DetectionCurve>& curves) {
  if (curves.empty()) return {};
  DetectionCurve mean = curves.front();
  for (std::size_t c = 1; c < curves.size(); ++c) {
    if (curves[c].size() != mean.size()) throw UsageError("curves sampled at different times");
    for (std::size_t i = 0; i < mean.size(); ++i) {
      if (curves[c][i].t != mean[i].t) throw UsageError("curves sampled at different times");
      mean[i].central += curves[c][i].central;
      mean[i].noncentral += curves[c][i].noncentral;
    }
  }
  const auto k = static_cast<double>(curves.size());
  for (auto& s : mean) {
    s.central /= k;
    s.noncentral /= k;
  }
  return mean;
}

void TraceAuditor::record(const TraceEvent& e) {
  if (e.time < last_) ++audit_.time_regressions;
  last_ = std::max(last_, e.time);
  if (!is_data(e.ptype)) return;
  if (e.evt == TraceKind::kSend) {
    ++audit_.sends;
    open_[e.pkt_id].assign(1, e.node);
    return;
  }
  auto it = open_.find(e.pkt_id);
  if (it == open_.end()) {
    if (e.pkt_id < closed_.size() && closed_[e.pkt_id]) {
      ++audit_.double_closures;
    } else {
      ++audit_.orphan_events;
    }
    return;
  }
  std::vector<NodeId>& hops = it->second;
  bool close = false;
  switch (e.evt) {
    case TraceKind::kForward:
    case TraceKind::kReceive:
      if (std::find(hops.begin(), hops.end(), e.node) != hops.end()) looped_.insert(e.pkt_id);
      hops.push_back(e.node);
      if (e.evt == TraceKind::kReceive) {
        ++audit_.deliveries;
        close = true;
      }
      break;
    case TraceKind::kDrop:
      if (e.reason == DropReason::kSimEnd) {
        ++audit_.end_drops;
      } else {
        ++audit_.drops;
      }
      close = true;
      break;
    case TraceKind::kSend:
      break;
  }
  if (close) {
    open_.erase(it);
    if (e.pkt_id >= closed_.size()) closed_.resize(e.pkt_id + 1, false);
    closed_[e.pkt_id] = true;
  }
}

TraceAudit TraceAuditor::result() const {
  TraceAudit out = audit_;
  out.unresolved = open_.size();
  out.looped_packets = looped_.size();
  return out;
}

TraceAudit audit_trace(const std::vector<TraceEvent>& events) {
  TraceAuditor auditor;
  for (const TraceEvent& e : events) auditor.record(e);
  return auditor.result();
}

TraceAudit& operator+=(TraceAudit& a, const TraceAudit& b) {
  a.sends += b.sends;
  a.deliveries += b.deliveries;
  a.drops += b.drops;
  a.end_drops += b.end_drops;
  a.unresolved += b.unresolved;
  a.looped_packets += b.looped_packets;
  a.orphan_events += b.orphan_events;
  a.time_regressions += b.time_regressions;
  a.double_closures += b.double_closures;
  return a;
}

namespace {

std::string printf_string(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

void check_stream(std::ostream& out, const char* what) {
  if (!out) throw std::runtime_error(std::string("failed writing ") + what);
}

}  // namespace

std::string format_fraction(double v) { return printf_string("%.4f", v); }

void write_ranking_csv(const ArrivalStats& stats, std::ostream& out) {
  out << "node,mean_latency_us,count,rank\n";
  const std::vector<NodeId> order = arrival_order(stats);
  std::vector<std::size_t> rank(stats.nodes.size(), 0);
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
  for (NodeId v : order) {
    const NodeArrival& a = stats.nodes[v];
    out << v << ',' << printf_string("%.3f", a.mean()) << ',' << a.count << ',' << rank[v]
        << '\n';
  }
  check_stream(out, "ranking CSV");
}

void write_detection_csv(const DetectionCurve& curve, std::ostream& out) {
  out << "t_ms,central_fraction,noncentral_fraction\n";
  for (const DetectionSample& s : curve) {
    out << s.t / kTicksPerMs << ',' << printf_string("%.6f", s.central) << ','
        << printf_string("%.6f", s.noncentral) << '\n';
  }
  check_stream(out, "detection CSV");
}

void write_centrality_csv(const CentralityReport& report, std::ostream& out) {
  out << "node,information,betweenness,degree,rank_information\n";
  const std::vector<std::size_t> rank = report.information_rank_of();
  for (NodeId v = 0; v < report.scores.size(); ++v) {
    const NodeScores& s = report.scores[v];
    out << v << ',' << printf_string("%.9g", s.information) << ','
        << printf_string("%.9g", s.betweenness) << ',' << printf_string("%.9g", s.degree) << ','
        << rank[v] << '\n';
  }
  check_stream(out, "centrality CSV");
}

void Summary::set(const std::string& key, double value) { set(key, format_fraction(value)); }

void Summary::write(std::ostream& out) const {
  for (const auto& [key, value] : entries_) out << key << '=' << value << '\n';
  for (const std::string& n : notes_) out << "note=" << n << '\n';
  check_stream(out, "summary");
}

}  // namespace centrinet
