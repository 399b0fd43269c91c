#include "centrinet/aodv.hpp"

#include <algorithm>

namespace centrinet {

bool should_replace(const RouteEntry& current, std::uint64_t seq, std::uint32_t hop_count) {
  if (!current.valid) return true;
  if (seq != current.dest_seq) return seq > current.dest_seq;
  return hop_count < current.hop_count;
}

AodvRouter::AodvRouter(const Topology& topology, AodvParams params, NetKernel& kernel,
                       TraceSink& trace, PacketIds& ids, Hooks hooks)
    : topology_(topology),
      params_(params),
      kernel_(kernel),
      trace_(trace),
      ids_(ids),
      hooks_(std::move(hooks)),
      nodes_(topology.size()),
      inbox_(topology.size()) {}

void AodvRouter::trace(TraceKind evt, NodeId node, std::uint64_t pkt_id, PacketType type,
                       NodeId src, NodeId dst, DropReason reason) {
  const std::uint64_t size = type == PacketType::kRreq ? kRreqBytes : kRrepBytes;
  trace_.record({evt, kernel_.now(), node, pkt_id, type, src, dst, size, reason});
}

void AodvRouter::initiate_route_discovery(NodeId node, NodeId target) {
  if (node == target) return;
  NodeRoutingState& st = nodes_.at(node);
  if (st.discovering.contains(target)) return;
  ++st.own_seq;
  const std::uint64_t id = st.next_rreq_id++;
  st.seen_rreqs.emplace(node, id);
  st.discovering[target] = id;

  Rreq r;
  r.origin = node;
  r.origin_seq = st.own_seq;
  r.rreq_id = id;
  r.target = target;
  if (auto it = st.table.find(target); it != st.table.end()) r.target_seq = it->second.dest_seq;
  r.pkt_id = ids_.take();

  ++counters_.discoveries;
  trace(TraceKind::kSend, node, r.pkt_id, PacketType::kRreq, node, target);
  broadcast(node, r);
  kernel_.schedule(kernel_.now() + params_.discovery_timeout, EventKind::kRouteRequestTimeout,
                   {node, target, id});
}

void AodvRouter::send(NodeId from, NodeId to, Message m) {
  const SimTime at = kernel_.now() + params_.control_latency;
  auto& slot = inbox_[to][at];
  if (slot.empty()) kernel_.schedule(at, EventKind::kPacketArrival, {to, 0, 0});
  slot.push_back({from, std::move(m)});
}

void AodvRouter::broadcast(NodeId from, const Rreq& r) {
  for (NodeId w : topology_.neighbors(from)) send(from, w, r);
}

void AodvRouter::drain_inbox(NodeId node) {
  auto& pending = inbox_.at(node);
  auto it = pending.find(kernel_.now());
  if (it == pending.end()) return;
  std::vector<Delivery> batch = std::move(it->second);
  pending.erase(it);
  std::stable_sort(batch.begin(), batch.end(),
                   [](const Delivery& a, const Delivery& b) { return a.from < b.from; });
  for (const Delivery& d : batch) {
    if (const auto* rreq = std::get_if<Rreq>(&d.message)) {
      handle_rreq(node, *rreq, d.from);
    } else {
      handle_rrep(node, std::get<Rrep>(d.message), d.from);
    }
  }
}

bool AodvRouter::offer_route(NodeId node, NodeId dest, NodeId next_hop, std::uint32_t hop_count,
                             std::uint64_t seq) {
  if (dest == node) return false;
  auto& table = nodes_[node].table;
  auto [it, inserted] = table.try_emplace(dest);
  RouteEntry& entry = it->second;
  if (!inserted && !should_replace(entry, seq, hop_count)) return false;
  entry = {dest, next_hop, hop_count, seq, true};
  if (hooks_.route_installed) hooks_.route_installed(node, dest);
  return true;
}

void AodvRouter::handle_rreq(NodeId node, const Rreq& r, NodeId from) {
  NodeRoutingState& st = nodes_.at(node);
  if (!st.seen_rreqs.emplace(r.origin, r.rreq_id).second) return;
  offer_route(node, r.origin, from, r.hop_count + 1, r.origin_seq);
  const NodeId toward = st.table.at(r.origin).next_hop;

  if (node == r.target) {
    st.own_seq = std::max(st.own_seq, r.target_seq);
    trace(TraceKind::kReceive, node, r.pkt_id, PacketType::kRreq, r.origin, r.target);
    reply(node, r, toward, st.own_seq, 0);
    return;
  }
  if (params_.intermediate_reply) {
    auto it = st.table.find(r.target);
    if (it != st.table.end() && it->second.valid && it->second.dest_seq >= r.target_seq) {
      ++counters_.intermediate_replies;
      trace(TraceKind::kReceive, node, r.pkt_id, PacketType::kRreq, r.origin, r.target);
      reply(node, r, toward, it->second.dest_seq, it->second.hop_count);
      return;
    }
  }
  Rreq next = r;
  ++next.hop_count;
  ++counters_.rreq_rebroadcasts;
  trace(TraceKind::kForward, node, r.pkt_id, PacketType::kRreq, r.origin, r.target);
  broadcast(node, next);
}

void AodvRouter::reply(NodeId node, const Rreq& r, NodeId toward, std::uint64_t target_seq,
                       std::uint32_t hop_count) {
  Rrep p;
  p.origin = r.origin;
  p.target = r.target;
  p.target_seq = target_seq;
  p.hop_count = hop_count;
  p.replier = node;
  p.pkt_id = ids_.take();
  ++counters_.rreps_sent;
  trace(TraceKind::kSend, node, p.pkt_id, PacketType::kRrep, node, r.origin);
  send(node, toward, p);
}

void AodvRouter::handle_rrep(NodeId node, const Rrep& p, NodeId from) {
  const std::uint32_t hop_count = p.hop_count + 1;
  offer_route(node, p.target, from, hop_count, p.target_seq);
  if (node == p.origin) {
    trace(TraceKind::kReceive, node, p.pkt_id, PacketType::kRrep, p.replier, p.origin);
    nodes_[node].discovering.erase(p.target);
    return;
  }
  const RouteEntry* reverse = route(node, p.origin);
  if (reverse == nullptr) {
    trace(TraceKind::kDrop, node, p.pkt_id, PacketType::kRrep, p.replier, p.origin,
          DropReason::kNoRoute);
    return;
  }
  Rrep next = p;
  next.hop_count = hop_count;
  trace(TraceKind::kForward, node, p.pkt_id, PacketType::kRrep, p.replier, p.origin);
  send(node, reverse->next_hop, next);
}

void AodvRouter::on_discovery_timeout(NodeId node, NodeId target, std::uint64_t rreq_id) {
  auto& discovering = nodes_.at(node).discovering;
  auto it = discovering.find(target);
  if (it == discovering.end() || it->second != rreq_id) return;
  discovering.erase(it);
  if (next_hop(node, target)) return;
  ++counters_.failed_discoveries;
  if (hooks_.discovery_failed) hooks_.discovery_failed(node, target);
}

const RouteEntry* AodvRouter::route(NodeId node, NodeId dst) const {
  const auto& table = nodes_.at(node).table;
  auto it = table.find(dst);
  if (it == table.end() || !it->second.valid) return nullptr;
  return &it->second;
}

std::optional<NodeId> AodvRouter::next_hop(NodeId node, NodeId dst) const {
  if (node == dst) return std::nullopt;
  const RouteEntry* entry = route(node, dst);
  if (entry == nullptr) return std::nullopt;
  return entry->next_hop;
}

bool AodvRouter::discovery_pending(NodeId node, NodeId target) const {
  return nodes_.at(node).discovering.contains(target);
}

}  // namespace centrinet
