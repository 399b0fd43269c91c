#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <vector>

#include "centrinet/aodv.hpp"
#include "centrinet/graph.hpp"
#include "centrinet/net_event.hpp"
#include "centrinet/trace.hpp"
#include "centrinet/traffic.hpp"

namespace centrinet {

struct SimulationParams {
  SimTime duration = 900 * kTicksPerSecond;
  std::size_t queue_capacity = 1000;
  std::uint64_t bandwidth_bps = 250'000;
  SimTime per_hop_latency = kTicksPerMs;
  /// Packets at or above this size trigger the per-node detector.
  std::uint64_t detection_threshold = 5'000;
  AodvParams aodv;
};

/// A route obtained by a node that had packets waiting for it.
struct EstablishedRoute {
  NodeId node = 0;
  NodeId destination = 0;
  std::uint32_t hop_count = 0;
  SimTime at = 0;
};

struct SimulationResult {
  RunSummary kernel;
  std::uint64_t events_scheduled = 0;
  std::uint64_t events_remaining = 0;
  std::uint64_t data_sent = 0;
  std::uint64_t data_delivered = 0;
  std::uint64_t dropped_queue_full = 0;
  std::uint64_t dropped_no_route = 0;
  /// Data packets still queued or awaiting a route when the run ended; each
  /// gets a `d ... END` trace line.
  std::uint64_t in_flight_at_end = 0;
  /// Arrivals at a node already present in the packet's hop trace.
  std::uint64_t loop_arrivals = 0;
  AodvCounters aodv;
  std::vector<DetectionRecord> detections;
  std::vector<EstablishedRoute> established_routes;
};

/// One run: CBR flows (normal and anomalous) carried over AODV routes through
/// per-node drop-tail queues, with every observable step written to `trace`.
class Simulation {
 public:
  Simulation(const Topology& topology, SimulationParams params, std::vector<Flow> flows,
             TraceSink& trace);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Runs to params.duration. Callable once.
  SimulationResult run();

  const AodvRouter& router() const noexcept { return *router_; }
  const std::vector<Flow>& flows() const noexcept { return flows_; }

 private:
  using Slot = std::uint32_t;

  void flow_tick(std::size_t flow_index);
  void route_or_buffer(NodeId node, Slot slot);
  bool enqueue(NodeId node, Slot slot);
  void service(NodeId node);
  void arrive(NodeId node, Slot slot);
  void flush_pending(NodeId node, NodeId target);
  void fail_pending(NodeId node, NodeId target);
  void end_of_run();

  Slot allocate();
  void release(Slot slot);
  void trace_data(TraceKind evt, NodeId node, const Packet& p,
                  DropReason reason = DropReason::kNone);
  void drop(NodeId node, Slot slot, DropReason reason);

  const Topology& topology_;
  SimulationParams params_;
  std::vector<Flow> flows_;
  std::vector<std::uint64_t> emitted_;
  TraceSink& trace_;
  NetKernel kernel_;
  PacketIds ids_;
  std::unique_ptr<AodvRouter> router_;
  std::vector<DropTailQueue<Slot>> queues_;
  std::vector<std::map<NodeId, std::deque<Slot>>> pending_;
  std::vector<Packet> pool_;
  std::vector<Slot> free_slots_;
  ThresholdDetector detector_;
  SimulationResult result_;
  bool ran_ = false;
};

}  // namespace centrinet
