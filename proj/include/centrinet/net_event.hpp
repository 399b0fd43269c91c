#pragma once

#include <cstdint>

#include "centrinet/graph.hpp"
#include "centrinet/kernel.hpp"

namespace centrinet {

/// Payload carried by every network event; fields are kind-specific.
///   kFlowTick            ref = flow index
///   kQueueService        node
///   kPacketArrival       node (control-plane inbox drain)
///   kRouteRequestTimeout node, peer = target, ref = rreq id
struct NetPayload {
  NodeId node = 0;
  NodeId peer = 0;
  std::uint64_t ref = 0;
};

using NetKernel = Kernel<NetPayload>;

/// Global packet-id counter shared by data and control packets of one run.
class PacketIds {
 public:
  std::uint64_t take() noexcept { return next_++; }
  std::uint64_t issued() const noexcept { return next_; }

 private:
  std::uint64_t next_ = 0;
};

}  // namespace centrinet
