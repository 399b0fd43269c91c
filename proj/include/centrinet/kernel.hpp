#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "centrinet/errors.hpp"

namespace centrinet {

/// Simulated time in integer microseconds.
using SimTime = std::uint64_t;

inline constexpr SimTime kTicksPerMs = 1'000;
inline constexpr SimTime kTicksPerSecond = 1'000'000;

constexpr SimTime seconds_to_ticks(double s) {
  return static_cast<SimTime>(s * static_cast<double>(kTicksPerSecond) + 0.5);
}

enum class EventKind : std::uint8_t {
  kPacketArrival,
  kPacketSend,
  kQueueService,
  kRouteRequestTimeout,
  kFlowTick,
  kAnomalyInject,
  kSimEnd,
};

inline constexpr std::size_t kEventKindCount = 7;

template <typename Payload>
struct Event {
  SimTime fire_at = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kSimEnd;
  Payload payload{};
};

struct RunSummary {
  std::uint64_t dispatched = 0;
  SimTime final_clock = 0;
  bool stopped = false;
};

/// Sequential discrete-event kernel. Events dispatch in (fire_at, seq) order,
/// where seq is the global order of schedule() calls.
template <typename Payload>
class Kernel {
 public:
  using Handler = std::function<void(const Event<Payload>&)>;

  SimTime now() const noexcept { return now_; }
  std::uint64_t scheduled() const noexcept { return next_seq_; }
  std::size_t pending() const noexcept { return queue_.size(); }

  void on(EventKind kind, Handler h) { handlers_[static_cast<std::size_t>(kind)] = std::move(h); }

  void schedule(SimTime fire_at, EventKind kind, Payload payload = {}) {
    if (fire_at < now_) {
      throw InternalError("event scheduled at " + std::to_string(fire_at) +
                          " before current time " + std::to_string(now_));
    }
    queue_.push(Event<Payload>{fire_at, next_seq_++, kind, std::move(payload)});
  }

  /// Stop dispatching once the current handler returns.
  void stop() noexcept { stop_requested_ = true; }

  /// Dispatch every event with fire_at <= t_end. Handler exceptions
  /// propagate to the caller with the clock left at the failing event.
  RunSummary run_until(SimTime t_end) {
    RunSummary summary;
    stop_requested_ = false;
    while (!queue_.empty() && queue_.top().fire_at <= t_end && !stop_requested_) {
      Event<Payload> e = queue_.top();
      queue_.pop();
      now_ = e.fire_at;
      const auto& handler = handlers_[static_cast<std::size_t>(e.kind)];
      if (!handler) throw InternalError("no handler registered for event kind");
      ++dispatched_;
      ++summary.dispatched;
      handler(e);
    }
    summary.final_clock = now_;
    summary.stopped = stop_requested_;
    return summary;
  }

  std::uint64_t total_dispatched() const noexcept { return dispatched_; }

 private:
  struct Later {
    bool operator()(const Event<Payload>& a, const Event<Payload>& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event<Payload>, std::vector<Event<Payload>>, Later> queue_;
  std::array<Handler, kEventKindCount> handlers_{};
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  bool stop_requested_ = false;
};

}  // namespace centrinet
