#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "centrinet/graph.hpp"
#include "centrinet/kernel.hpp"

namespace centrinet {

enum class TraceKind : char { kSend = 's', kReceive = 'r', kForward = 'f', kDrop = 'd' };

enum class PacketType : std::uint8_t { kCbr, kAnomalous, kRreq, kRrep };

enum class DropReason : std::uint8_t { kNone, kQueueFull, kNoRoute, kSimEnd };

std::string_view to_string(PacketType t);
std::string_view to_string(DropReason r);

inline bool is_data(PacketType t) { return t == PacketType::kCbr || t == PacketType::kAnomalous; }

/// One trace line:
///   <evt> <time_ticks> <node> <pkt_id> <ptype> <src> <dst> <size_bytes> <reason>
struct TraceEvent {
  TraceKind evt = TraceKind::kSend;
  SimTime time = 0;
  NodeId node = 0;
  std::uint64_t pkt_id = 0;
  PacketType ptype = PacketType::kCbr;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint64_t size = 0;
  DropReason reason = DropReason::kNone;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

std::string format_trace_line(const TraceEvent& e);

/// Parses one line (without the newline). Throws ParseError tagged `line_no`.
TraceEvent parse_trace_line(std::string_view line, std::size_t line_no);

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void record(const TraceEvent& e) = 0;
};

/// Writes formatted lines; a failed stream raises std::runtime_error.
class TraceWriter final : public TraceSink {
 public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}
  void record(const TraceEvent& e) override;

 private:
  std::ostream& out_;
};

class TraceRecorder final : public TraceSink {
 public:
  void record(const TraceEvent& e) override { events_.push_back(e); }
  const std::vector<TraceEvent>& events() const noexcept { return events_; }

 private:
  std::vector<TraceEvent> events_;
};

/// Forwards each event to several sinks in order.
class TraceFanout final : public TraceSink {
 public:
  void add(TraceSink& sink) { sinks_.push_back(&sink); }
  void record(const TraceEvent& e) override {
    for (TraceSink* s : sinks_) s->record(e);
  }

 private:
  std::vector<TraceSink*> sinks_;
};

/// Streams a trace file through `visit`, one parsed event per line.
void read_trace(std::istream& in, const std::function<void(const TraceEvent&)>& visit);

std::vector<TraceEvent> read_trace(std::istream& in);

}  // namespace centrinet
