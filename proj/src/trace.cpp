#include "centrinet/trace.hpp"

#include <charconv>
#include <limits>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "centrinet/errors.hpp"

namespace centrinet {

std::string_view to_string(PacketType t) {
  switch (t) {
    case PacketType::kCbr: return "cbr";
    case PacketType::kAnomalous: return "anom";
    case PacketType::kRreq: return "rreq";
    case PacketType::kRrep: return "rrep";
  }
  return "?";
}

std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::kNone: return "-";
    case DropReason::kQueueFull: return "IFQ";
    case DropReason::kNoRoute: return "NRTE";
    case DropReason::kSimEnd: return "END";
  }
  return "?";
}

std::string format_trace_line(const TraceEvent& e) {
  std::string line;
  line.reserve(64);
  line += static_cast<char>(e.evt);
  auto append = [&line](std::uint64_t v) {
    char buf[24];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    line += ' ';
    line.append(buf, end);
  };
  append(e.time);
  append(e.node);
  append(e.pkt_id);
  line += ' ';
  line += to_string(e.ptype);
  append(e.src);
  append(e.dst);
  append(e.size);
  line += ' ';
  line += to_string(e.reason);
  return line;
}

namespace {

class FieldReader {
 public:
  FieldReader(std::string_view line, std::size_t line_no) : rest_(line), line_no_(line_no) {}

  std::string_view next(const char* what) {
    if (rest_.empty()) throw ParseError(line_no_, std::string("missing field ") + what);
    const auto space = rest_.find(' ');
    std::string_view field = rest_.substr(0, space);
    rest_ = space == std::string_view::npos ? std::string_view{} : rest_.substr(space + 1);
    if (field.empty()) throw ParseError(line_no_, std::string("empty field ") + what);
    return field;
  }

  std::uint64_t number(const char* what) {
    const std::string_view f = next(what);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || ptr != f.data() + f.size()) {
      throw ParseError(line_no_, std::string("bad integer for ") + what + ": '" +
                                     std::string(f) + "'");
    }
    return v;
  }

  bool done() const { return rest_.empty(); }

 private:
  std::string_view rest_;
  std::size_t line_no_;
};

}  // namespace

TraceEvent parse_trace_line(std::string_view line, std::size_t line_no) {
  FieldReader fields(line, line_no);
  TraceEvent e;
  const std::string_view evt = fields.next("evt");
  if (evt.size() != 1 || std::string_view("srfd").find(evt[0]) == std::string_view::npos) {
    throw ParseError(line_no, "unknown event '" + std::string(evt) + "'");
  }
  e.evt = static_cast<TraceKind>(evt[0]);
  e.time = fields.number("time");
  const std::uint64_t node = fields.number("node");
  e.pkt_id = fields.number("pkt_id");
  const std::string_view ptype = fields.next("ptype");
  if (ptype == "cbr") {
    e.ptype = PacketType::kCbr;
  } else if (ptype == "anom") {
    e.ptype = PacketType::kAnomalous;
  } else if (ptype == "rreq") {
    e.ptype = PacketType::kRreq;
  } else if (ptype == "rrep") {
    e.ptype = PacketType::kRrep;
  } else {
    throw ParseError(line_no, "unknown packet type '" + std::string(ptype) + "'");
  }
  const std::uint64_t src = fields.number("src");
  const std::uint64_t dst = fields.number("dst");
  e.size = fields.number("size");
  const std::string_view reason = fields.next("reason");
  if (reason == "-") {
    e.reason = DropReason::kNone;
  } else if (reason == "IFQ") {
    e.reason = DropReason::kQueueFull;
  } else if (reason == "NRTE") {
    e.reason = DropReason::kNoRoute;
  } else if (reason == "END") {
    e.reason = DropReason::kSimEnd;
  } else {
    throw ParseError(line_no, "unknown drop reason '" + std::string(reason) + "'");
  }
  if (!fields.done()) throw ParseError(line_no, "trailing fields");
  constexpr std::uint64_t kMaxNode = std::numeric_limits<NodeId>::max();
  if (node > kMaxNode || src > kMaxNode || dst > kMaxNode) {
    throw ParseError(line_no, "node id out of range");
  }
  e.node = static_cast<NodeId>(node);
  e.src = static_cast<NodeId>(src);
  e.dst = static_cast<NodeId>(dst);
  if ((e.evt == TraceKind::kDrop) != (e.reason != DropReason::kNone)) {
    throw ParseError(line_no, "drop reason must be given exactly on 'd' lines");
  }
  return e;
}

void TraceWriter::record(const TraceEvent& e) {
  out_ << format_trace_line(e) << '\n';
  if (!out_) throw std::runtime_error("trace write failed");
}

void read_trace(std::istream& in, const std::function<void(const TraceEvent&)>& visit) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    visit(parse_trace_line(line, line_no));
  }
}

std::vector<TraceEvent> read_trace(std::istream& in) {
  std::vector<TraceEvent> out;
  read_trace(in, [&out](const TraceEvent& e) { out.push_back(e); });
  return out;
}

}  // namespace centrinet
