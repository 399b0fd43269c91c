#include "centrinet/traffic.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "centrinet/centrality.hpp"
#include "centrinet/errors.hpp"
#include "centrinet/rng.hpp"

namespace centrinet {

namespace {
__extension__ using u128 = unsigned __int128;
}  // namespace

SimTime cbr_offset(std::uint64_t k, double rate_per_ms) {
  // Rate in packets per 10^6 ms; offset = k * 10^9 / that, floored.
  const auto micro_rate = static_cast<std::uint64_t>(std::llround(rate_per_ms * 1e6));
  if (micro_rate == 0) throw ConfigError("packet rate too small");
  const u128 num = static_cast<u128>(k) * 1'000'000'000ULL;
  return static_cast<SimTime>(num / micro_rate);
}

std::vector<Flow> spawn_flows(const Topology& t, std::size_t count, const TrafficParams& params,
                              std::uint64_t seed) {
  const std::size_t n = t.size();
  if (n < 2) throw ConfigError("at least two nodes are needed for traffic");
  if (count == 0) throw ConfigError("num_connections must be at least 1");
  if (count > n * (n - 1)) {
    throw ConfigError("num_connections " + std::to_string(count) + " exceeds the " +
                      std::to_string(n * (n - 1)) + " ordered node pairs");
  }
  Rng rng(derive_seed(seed, "flows"));
  std::set<std::pair<NodeId, NodeId>> used;
  std::vector<Flow> flows;
  flows.reserve(count);
  while (flows.size() < count) {
    const auto src = static_cast<NodeId>(rng.below(n));
    auto dst = static_cast<NodeId>(rng.below(n - 1));
    if (dst >= src) ++dst;
    if (!used.emplace(src, dst).second) continue;
    Flow f;
    f.flow_id = static_cast<std::uint32_t>(flows.size());
    f.src = src;
    f.dst = dst;
    f.rate_per_ms = params.rate_per_ms;
    f.packet_size = params.packet_size;
    f.start_at = params.stagger > 0 ? rng.below(params.stagger) : 0;
    f.stop_at = params.stop_at;
    flows.push_back(f);
  }
  return flows;
}

SimTime transmit_time(std::uint64_t size, std::uint64_t bandwidth_bps, SimTime per_hop_latency) {
  if (bandwidth_bps == 0) throw ConfigError("bandwidth must be positive");
  const u128 bits_us = static_cast<u128>(size) * 8 * kTicksPerSecond;
  const auto serialization =
      static_cast<SimTime>((bits_us + bandwidth_bps - 1) / bandwidth_bps);
  return serialization + per_hop_latency;
}

std::vector<Flow> AnomalyPlan::flows(std::uint32_t first_flow_id) const {
  std::vector<Flow> out;
  for (std::size_t i = 0; i < origins.size(); ++i) {
    Flow f;
    f.flow_id = first_flow_id + static_cast<std::uint32_t>(i);
    f.src = origins[i];
    f.dst = destinations[i];
    f.rate_per_ms = rate_per_ms;
    f.packet_size = anomaly_size;
    f.start_at = inject_at;
    f.stop_at = stop_at;
    f.anomalous = true;
    out.push_back(f);
  }
  return out;
}

AnomalyPlan build_anomaly_plan(const Topology& t, const AnomalyConfig& cfg, std::uint64_t seed) {
  if (!(cfg.origin_fraction > 0.0 && cfg.origin_fraction < 1.0)) {
    throw ConfigError("anomaly_origin_fraction must lie in (0, 1)");
  }
  if (cfg.anomaly_size == 0) throw ConfigError("anomaly_size_bytes must be positive");
  const std::size_t n = t.size();
  if (n < 2) throw ConfigError("anomaly needs at least two nodes");

  Rng rng(derive_seed(seed, "anomaly"));
  const std::size_t count = fraction_count(cfg.origin_fraction, n);
  // Partial Fisher-Yates: the first `count` slots become the origins.
  std::vector<NodeId> pool(n);
  std::iota(pool.begin(), pool.end(), NodeId{0});
  AnomalyPlan plan;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(pool[i], pool[j]);
    plan.origins.push_back(pool[i]);
  }
  for (NodeId origin : plan.origins) {
    auto dst = static_cast<NodeId>(rng.below(n - 1));
    if (dst >= origin) ++dst;
    plan.destinations.push_back(dst);
  }
  plan.anomaly_size = cfg.anomaly_size;
  plan.inject_at = cfg.inject_at;
  plan.stop_at = cfg.stop_at;
  plan.rate_per_ms = cfg.rate_per_ms;
  return plan;
}

std::optional<DetectionRecord> ThresholdDetector::observe(NodeId node, std::uint64_t pkt_id,
                                                          std::uint64_t size, SimTime now) {
  if (size < threshold_ || detected_.at(node)) return std::nullopt;
  detected_[node] = 1;
  DetectionRecord r{node, now, pkt_id, size};
  records_.push_back(r);
  return r;
}

}  // namespace centrinet
