#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "centrinet/graph.hpp"
#include "centrinet/net_event.hpp"
#include "centrinet/trace.hpp"

namespace centrinet {

// Simplified AODV for a static mesh: RREQ flooding, RREP unicast along the
// reverse path, sequence-numbered route tables. There is no RERR, HELLO or
// route expiry because links never change.

struct RouteEntry {
  NodeId destination = 0;
  NodeId next_hop = 0;
  std::uint32_t hop_count = 0;
  std::uint64_t dest_seq = 0;
  bool valid = false;
};

/// Fresher sequence number wins; on equal sequence numbers only a strictly
/// shorter route replaces the current one.
bool should_replace(const RouteEntry& current, std::uint64_t seq, std::uint32_t hop_count);

struct Rreq {
  NodeId origin = 0;
  std::uint64_t origin_seq = 0;
  std::uint64_t rreq_id = 0;
  NodeId target = 0;
  /// Last sequence number the origin knew for target; 0 if none.
  std::uint64_t target_seq = 0;
  std::uint32_t hop_count = 0;
  std::uint64_t pkt_id = 0;
};

struct Rrep {
  NodeId origin = 0;
  NodeId target = 0;
  std::uint64_t target_seq = 0;
  std::uint32_t hop_count = 0;
  NodeId replier = 0;
  std::uint64_t pkt_id = 0;
};

inline constexpr std::uint64_t kRreqBytes = 24;
inline constexpr std::uint64_t kRrepBytes = 20;

struct NodeRoutingState {
  std::uint64_t own_seq = 0;
  std::uint64_t next_rreq_id = 0;
  std::map<NodeId, RouteEntry> table;
  std::set<std::pair<NodeId, std::uint64_t>> seen_rreqs;
  /// Outstanding discoveries: target -> rreq id.
  std::map<NodeId, std::uint64_t> discovering;
};

struct AodvParams {
  SimTime control_latency = 2 * kTicksPerMs;
  SimTime discovery_timeout = kTicksPerSecond;
  bool intermediate_reply = true;
};

struct AodvCounters {
  std::uint64_t discoveries = 0;
  std::uint64_t rreq_rebroadcasts = 0;
  std::uint64_t rreps_sent = 0;
  std::uint64_t intermediate_replies = 0;
  std::uint64_t failed_discoveries = 0;
};

class AodvRouter {
 public:
  struct Hooks {
    /// A valid route from `node` to `target` was installed or improved.
    std::function<void(NodeId node, NodeId target)> route_installed;
    /// Discovery from `node` timed out with no route to `target`.
    std::function<void(NodeId node, NodeId target)> discovery_failed;
  };

  AodvRouter(const Topology& topology, AodvParams params, NetKernel& kernel, TraceSink& trace,
             PacketIds& ids, Hooks hooks);

  /// Floods an RREQ from `node` unless a discovery for `target` is already
  /// outstanding there.
  void initiate_route_discovery(NodeId node, NodeId target);

  void handle_rreq(NodeId node, const Rreq& r, NodeId from);
  void handle_rrep(NodeId node, const Rrep& r, NodeId from);

  /// Next hop of a valid route; none for unknown destinations and for
  /// dst == node (local delivery).
  std::optional<NodeId> next_hop(NodeId node, NodeId dst) const;
  const RouteEntry* route(NodeId node, NodeId dst) const;
  bool discovery_pending(NodeId node, NodeId target) const;

  const NodeRoutingState& state(NodeId node) const { return nodes_.at(node); }
  const AodvCounters& counters() const noexcept { return counters_; }

  /// Kernel entry points.
  void drain_inbox(NodeId node);
  void on_discovery_timeout(NodeId node, NodeId target, std::uint64_t rreq_id);

 private:
  using Message = std::variant<Rreq, Rrep>;
  struct Delivery {
    NodeId from;
    Message message;
  };

  void send(NodeId from, NodeId to, Message m);
  void broadcast(NodeId from, const Rreq& r);
  void reply(NodeId node, const Rreq& r, NodeId toward, std::uint64_t target_seq,
             std::uint32_t hop_count);
  bool offer_route(NodeId node, NodeId dest, NodeId next_hop, std::uint32_t hop_count,
                   std::uint64_t seq);
  void trace(TraceKind evt, NodeId node, std::uint64_t pkt_id, PacketType type, NodeId src,
             NodeId dst, DropReason reason = DropReason::kNone);

  const Topology& topology_;
  AodvParams params_;
  NetKernel& kernel_;
  TraceSink& trace_;
  PacketIds& ids_;
  Hooks hooks_;
  std::vector<NodeRoutingState> nodes_;
  // Per node: arrival tick -> control messages landing at that tick. Copies
  // that land together are handled in ascending sender order.
  std::vector<std::map<SimTime, std::vector<Delivery>>> inbox_;
  AodvCounters counters_;
};

}  // namespace centrinet
