#include "centrinet/simulation.hpp"

#include <algorithm>

#include "centrinet/errors.hpp"

namespace centrinet {

Simulation::Simulation(const Topology& topology, SimulationParams params, std::vector<Flow> flows,
                       TraceSink& trace)
    : topology_(topology),
      params_(params),
      flows_(std::move(flows)),
      emitted_(flows_.size(), 0),
      trace_(trace),
      queues_(topology.size(), DropTailQueue<Slot>(params.queue_capacity)),
      pending_(topology.size()),
      detector_(topology.size(), params.detection_threshold) {
  for (const Flow& f : flows_) {
    if (f.src >= topology.size() || f.dst >= topology.size()) {
      throw ConfigError("flow endpoint out of range");
    }
    if (f.src == f.dst) throw ConfigError("flow source equals destination");
    if (!(f.rate_per_ms > 0.0) || f.packet_size == 0 || f.start_at >= f.stop_at) {
      throw ConfigError("flow " + std::to_string(f.flow_id) + " has invalid rate, size or window");
    }
  }
  AodvRouter::Hooks hooks;
  hooks.route_installed = [this](NodeId node, NodeId target) { flush_pending(node, target); };
  hooks.discovery_failed = [this](NodeId node, NodeId target) { fail_pending(node, target); };
  router_ = std::make_unique<AodvRouter>(topology_, params_.aodv, kernel_, trace_, ids_,
                                         std::move(hooks));

  kernel_.on(EventKind::kFlowTick, [this](const auto& e) { flow_tick(e.payload.ref); });
  kernel_.on(EventKind::kAnomalyInject, [this](const auto& e) { flow_tick(e.payload.ref); });
  kernel_.on(EventKind::kQueueService, [this](const auto& e) { service(e.payload.node); });
  kernel_.on(EventKind::kPacketArrival,
             [this](const auto& e) { router_->drain_inbox(e.payload.node); });
  kernel_.on(EventKind::kRouteRequestTimeout, [this](const auto& e) {
    router_->on_discovery_timeout(e.payload.node, e.payload.peer, e.payload.ref);
  });
  kernel_.on(EventKind::kSimEnd, [this](const auto&) { end_of_run(); });
  kernel_.on(EventKind::kPacketSend, [](const auto&) {
    throw InternalError("packet_send events are not used by this model");
  });
}

SimulationResult Simulation::run() {
  if (ran_) throw UsageError("Simulation::run called twice");
  ran_ = true;
  kernel_.schedule(params_.duration, EventKind::kSimEnd);
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    const Flow& f = flows_[i];
    if (f.start_at >= params_.duration) continue;
    kernel_.schedule(f.start_at, f.anomalous ? EventKind::kAnomalyInject : EventKind::kFlowTick,
                     {f.src, f.dst, i});
  }
  result_.kernel = kernel_.run_until(params_.duration);
  result_.events_scheduled = kernel_.scheduled();
  result_.events_remaining = kernel_.pending();
  result_.aodv = router_->counters();
  result_.detections = detector_.records();
  return result_;
}

Simulation::Slot Simulation::allocate() {
  if (!free_slots_.empty()) {
    const Slot s = free_slots_.back();
    free_slots_.pop_back();
    return s;
  }
  pool_.emplace_back();
  return static_cast<Slot>(pool_.size() - 1);
}

void Simulation::release(Slot slot) {
  pool_[slot].hop_trace.clear();
  free_slots_.push_back(slot);
}

void Simulation::trace_data(TraceKind evt, NodeId node, const Packet& p, DropReason reason) {
  trace_.record({evt, kernel_.now(), node, p.pkt_id,
                 p.is_anomalous ? PacketType::kAnomalous : PacketType::kCbr, p.src, p.dst, p.size,
                 reason});
}

void Simulation::drop(NodeId node, Slot slot, DropReason reason) {
  trace_data(TraceKind::kDrop, node, pool_[slot], reason);
  switch (reason) {
    case DropReason::kQueueFull: ++result_.dropped_queue_full; break;
    case DropReason::kNoRoute: ++result_.dropped_no_route; break;
    case DropReason::kSimEnd: ++result_.in_flight_at_end; break;
    case DropReason::kNone: throw InternalError("drop without reason");
  }
  release(slot);
}

void Simulation::flow_tick(std::size_t flow_index) {
  const Flow& f = flows_.at(flow_index);
  const SimTime now = kernel_.now();
  if (now >= f.stop_at) return;

  const Slot slot = allocate();
  Packet& p = pool_[slot];
  p.pkt_id = ids_.take();
  p.flow_id = f.flow_id;
  p.src = f.src;
  p.dst = f.dst;
  p.size = f.packet_size;
  p.created_at = now;
  p.is_anomalous = f.anomalous;
  p.hop_trace.assign(1, f.src);
  ++result_.data_sent;
  trace_data(TraceKind::kSend, f.src, p);

  const SimTime next = f.start_at + cbr_offset(++emitted_[flow_index], f.rate_per_ms);
  if (next < f.stop_at && next <= params_.duration) {
    kernel_.schedule(next, EventKind::kFlowTick, {f.src, f.dst, flow_index});
  }
  route_or_buffer(f.src, slot);
}

void Simulation::route_or_buffer(NodeId node, Slot slot) {
  const NodeId dst = pool_[slot].dst;
  if (router_->next_hop(node, dst)) {
    enqueue(node, slot);
    return;
  }
  pending_[node][dst].push_back(slot);
  router_->initiate_route_discovery(node, dst);
}

bool Simulation::enqueue(NodeId node, Slot slot) {
  DropTailQueue<Slot>& q = queues_[node];
  if (!q.push(slot)) {
    drop(node, slot, DropReason::kQueueFull);
    return false;
  }
  if (!q.busy) {
    q.busy = true;
    kernel_.schedule(kernel_.now() + transmit_time(pool_[slot].size, params_.bandwidth_bps,
                                                   params_.per_hop_latency),
                     EventKind::kQueueService, {node, 0, 0});
  }
  return true;
}

void Simulation::service(NodeId node) {
  DropTailQueue<Slot>& q = queues_[node];
  if (q.empty()) throw InternalError("service event on an empty queue");
  const Slot slot = q.pop();
  if (!q.empty()) {
    kernel_.schedule(kernel_.now() + transmit_time(pool_[q.front()].size, params_.bandwidth_bps,
                                                   params_.per_hop_latency),
                     EventKind::kQueueService, {node, 0, 0});
  } else {
    q.busy = false;
  }
  const auto hop = router_->next_hop(node, pool_[slot].dst);
  if (!hop) throw InternalError("queued packet lost its route");
  arrive(*hop, slot);
}

void Simulation::arrive(NodeId node, Slot slot) {
  Packet& p = pool_[slot];
  if (std::find(p.hop_trace.begin(), p.hop_trace.end(), node) != p.hop_trace.end()) {
    ++result_.loop_arrivals;
  }
  p.hop_trace.push_back(node);
  const bool delivered = node == p.dst;
  trace_data(delivered ? TraceKind::kReceive : TraceKind::kForward, node, p);
  detector_.observe(node, p.pkt_id, p.size, kernel_.now());
  if (delivered) {
    ++result_.data_delivered;
    release(slot);
    return;
  }
  route_or_buffer(node, slot);
}

void Simulation::flush_pending(NodeId node, NodeId target) {
  auto& waiting = pending_[node];
  auto it = waiting.find(target);
  if (it == waiting.end()) return;
  std::deque<Slot> slots = std::move(it->second);
  waiting.erase(it);
  result_.established_routes.push_back(
      {node, target, router_->route(node, target)->hop_count, kernel_.now()});
  for (Slot s : slots) enqueue(node, s);
}

void Simulation::fail_pending(NodeId node, NodeId target) {
  auto& waiting = pending_[node];
  auto it = waiting.find(target);
  if (it == waiting.end()) return;
  std::deque<Slot> slots = std::move(it->second);
  waiting.erase(it);
  for (Slot s : slots) drop(node, s, DropReason::kNoRoute);
}

void Simulation::end_of_run() {
  for (NodeId v = 0; v < topology_.size(); ++v) {
    DropTailQueue<Slot>& q = queues_[v];
    while (!q.empty()) drop(v, q.pop(), DropReason::kSimEnd);
    q.busy = false;
    for (auto& [target, slots] : pending_[v]) {
      for (Slot s : slots) drop(v, s, DropReason::kSimEnd);
    }
    pending_[v].clear();
  }
  kernel_.stop();
}

}  // namespace centrinet
