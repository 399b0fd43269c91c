#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "centrinet/graph.hpp"
#include "centrinet/kernel.hpp"

namespace centrinet {

struct Packet {
  std::uint64_t pkt_id = 0;
  std::uint32_t flow_id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint64_t size = 0;
  SimTime created_at = 0;
  std::vector<NodeId> hop_trace;
  /// Ground truth; detectors only ever see the size.
  bool is_anomalous = false;
};

/// Constant-bit-rate source.
struct Flow {
  std::uint32_t flow_id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double rate_per_ms = 0.0;
  std::uint64_t packet_size = 0;
  SimTime start_at = 0;
  SimTime stop_at = 0;
  bool anomalous = false;
};

/// Offset from the flow start of the k-th packet (k = 0 is the first).
/// Offsets are floor(k * 1000 / rate) microseconds computed exactly, so gaps
/// may alternate (3/ms gives 333, 333, 334) while the long-run rate is exact.
SimTime cbr_offset(std::uint64_t k, double rate_per_ms);

struct TrafficParams {
  double rate_per_ms = 2.0;
  std::uint64_t packet_size = 500;
  /// Flow starts are drawn uniformly from [0, stagger).
  SimTime stagger = kTicksPerSecond;
  SimTime stop_at = 900 * kTicksPerSecond;
};

/// `count` CBR flows over distinct ordered (src, dst) pairs. Throws
/// ConfigError when count exceeds n(n-1) or n < 2.
std::vector<Flow> spawn_flows(const Topology& t, std::size_t count, const TrafficParams& params,
                              std::uint64_t seed);

/// Serialization time of `size` bytes at `bandwidth_bps` (rounded up to a
/// whole tick) plus the fixed per-hop latency.
SimTime transmit_time(std::uint64_t size, std::uint64_t bandwidth_bps, SimTime per_hop_latency);

/// Bounded FIFO with drop-tail admission. The packet in service stays at the
/// head (and counts against capacity) until its transmission completes.
template <typename T>
class DropTailQueue {
 public:
  explicit DropTailQueue(std::size_t capacity) : capacity_(capacity) {}

  bool push(T item) {
    if (items_.size() >= capacity_) return false;
    items_.push_back(std::move(item));
    return true;
  }
  T pop() {
    T item = std::move(items_.front());
    items_.pop_front();
    return item;
  }
  const T& front() const { return items_.front(); }
  bool empty() const noexcept { return items_.empty(); }
  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  bool busy = false;

 private:
  std::size_t capacity_;
  std::deque<T> items_;
};

struct AnomalyConfig {
  double origin_fraction = 0.05;
  std::uint64_t anomaly_size = 10'000'000;
  SimTime inject_at = 80 * kTicksPerSecond;
  SimTime stop_at = 900 * kTicksPerSecond;
  double rate_per_ms = 2.0;
};

/// Origins of the volume anomaly and the single destination each one floods.
struct AnomalyPlan {
  std::vector<NodeId> origins;
  std::vector<NodeId> destinations;
  std::uint64_t anomaly_size = 0;
  SimTime inject_at = 0;
  SimTime stop_at = 0;
  double rate_per_ms = 0.0;

  /// One anomalous CBR flow per origin, ids starting at `first_flow_id`.
  std::vector<Flow> flows(std::uint32_t first_flow_id) const;
};

/// ceil(origin_fraction * n) origins drawn without replacement, each with a
/// uniform destination other than itself.
AnomalyPlan build_anomaly_plan(const Topology& t, const AnomalyConfig& cfg, std::uint64_t seed);

struct DetectionRecord {
  NodeId node = 0;
  SimTime first_detect_at = 0;
  std::uint64_t pkt_id = 0;
  std::uint64_t observed_size = 0;

  friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

/// Per-node size-threshold detector: the first data packet at or above the
/// threshold seen by a node produces that node's only record.
class ThresholdDetector {
 public:
  ThresholdDetector(std::size_t n, std::uint64_t threshold_bytes)
      : threshold_(threshold_bytes), detected_(n, 0) {}

  std::optional<DetectionRecord> observe(NodeId node, std::uint64_t pkt_id, std::uint64_t size,
                                         SimTime now);

  const std::vector<DetectionRecord>& records() const noexcept { return records_; }
  std::uint64_t threshold() const noexcept { return threshold_; }

 private:
  std::uint64_t threshold_;
  std::vector<char> detected_;
  std::vector<DetectionRecord> records_;
};

}  // namespace centrinet
