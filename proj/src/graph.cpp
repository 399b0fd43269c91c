#include "centrinet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "centrinet/errors.hpp"
#include "centrinet/rng.hpp"

namespace centrinet {

Topology::Topology(std::size_t n, std::span<const Edge> edges, std::vector<Position> positions,
                   double radio_range)
    : adjacency_(n), positions_(std::move(positions)), radio_range_(radio_range) {
  if (positions_.empty()) positions_.resize(n);
  if (positions_.size() != n) throw UsageError("position count does not match node count");
  edges_.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw UsageError("edge endpoint out of range");
    if (u == v) throw UsageError("self-loop on node " + std::to_string(u));
    edges_.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw UsageError("duplicate edge " + std::to_string(dup->first) + "-" +
                     std::to_string(dup->second));
  }
  for (auto [u, v] : edges_) {
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

std::span<const NodeId> Topology::neighbors(NodeId v) const {
  if (v >= adjacency_.size()) {
    throw UsageError("node " + std::to_string(v) + " out of range");
  }
  return adjacency_[v];
}

bool Topology::has_edge(NodeId u, NodeId v) const {
  auto list = neighbors(u);
  return std::binary_search(list.begin(), list.end(), v);
}

namespace {

double quantize(double meters) { return std::round(meters * 1e6) / 1e6; }

}  // namespace

std::vector<Position> random_positions(std::size_t n, double width, double height,
                                       std::uint64_t seed) {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw ConfigError("simulation area dimensions must be positive");
  }
  if (n == 0) throw ConfigError("node count must be at least 1");
  Rng rng(derive_seed(seed, "positions"));
  std::vector<Position> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = quantize(rng.uniform01() * width);
    const double y = quantize(rng.uniform01() * height);
    out.push_back({std::min(x, width), std::min(y, height)});
  }
  return out;
}

Topology build_unit_disk(std::vector<Position> positions, double radio_range) {
  if (!(radio_range > 0.0)) throw ConfigError("radio range must be positive");
  const double r2 = radio_range * radio_range;
  std::vector<Edge> edges;
  for (NodeId u = 0; u < positions.size(); ++u) {
    for (NodeId v = u + 1; v < positions.size(); ++v) {
      const double dx = positions[u].x - positions[v].x;
      const double dy = positions[u].y - positions[v].y;
      if (dx * dx + dy * dy <= r2) edges.emplace_back(u, v);
    }
  }
  const std::size_t n = positions.size();
  return Topology(n, edges, std::move(positions), radio_range);
}

bool is_connected(const Topology& t) {
  if (t.size() == 0) return true;
  std::vector<char> seen(t.size(), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (NodeId w : t.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == t.size();
}

Topology connected_unit_disk(std::size_t n, double width, double height, double radio_range,
                             std::uint64_t seed, int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, "resample", attempt);
    Topology t = build_unit_disk(random_positions(n, width, height, s), radio_range);
    if (is_connected(t)) return t;
  }
  throw ConfigError("no connected topology after " + std::to_string(max_attempts) +
                    " attempts; increase radio_range_m or num_nodes");
}

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void save_topology(const Topology& t, std::ostream& out) {
  out << "nodes " << t.size() << " range " << fixed6(t.radio_range()) << '\n';
  for (NodeId i = 0; i < t.size(); ++i) {
    const Position& p = t.positions()[i];
    out << "pos " << i << ' ' << fixed6(p.x) << ' ' << fixed6(p.y) << '\n';
  }
  for (auto [u, v] : t.edges()) out << "edge " << u << ' ' << v << '\n';
}

Topology load_topology(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t n = 0;
  double range = 0.0;
  std::vector<Position> positions;
  std::vector<char> placed;
  std::vector<Edge> edges;
  std::set<Edge> seen_edges;

  auto node_index = [&](long long raw) -> NodeId {
    if (raw < 0 || static_cast<unsigned long long>(raw) >= n) {
      throw ParseError(line_no, "node index " + std::to_string(raw) + " out of range for " +
                                    std::to_string(n) + " nodes");
    }
    return static_cast<NodeId>(raw);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    std::string rest;
    if (!have_header) {
      std::string range_tag;
      long long count = -1;
      if (tag != "nodes" || !(fields >> count >> range_tag >> range) || range_tag != "range" ||
          count < 0 || (fields >> rest)) {
        throw ParseError(line_no, "expected 'nodes <n> range <r>'");
      }
      n = static_cast<std::size_t>(count);
      positions.assign(n, {});
      placed.assign(n, 0);
      have_header = true;
      continue;
    }
    if (tag == "pos") {
      long long id = -1;
      Position p;
      if (!(fields >> id >> p.x >> p.y) || (fields >> rest)) {
        throw ParseError(line_no, "expected 'pos <id> <x> <y>'");
      }
      const NodeId v = node_index(id);
      if (placed[v]) throw ParseError(line_no, "duplicate position for node " + std::to_string(v));
      placed[v] = 1;
      positions[v] = p;
    } else if (tag == "edge") {
      long long a = -1, b = -1;
      if (!(fields >> a >> b) || (fields >> rest)) {
        throw ParseError(line_no, "expected 'edge <u> <v>'");
      }
      const NodeId u = node_index(a);
      const NodeId v = node_index(b);
      if (u == v) throw ParseError(line_no, "self-loop on node " + std::to_string(u));
      const Edge e{std::min(u, v), std::max(u, v)};
      if (!seen_edges.insert(e).second) {
        throw ParseError(line_no, "duplicate edge " + std::to_string(e.first) + " " +
                                      std::to_string(e.second));
      }
      edges.push_back(e);
    } else {
      throw ParseError(line_no, "unknown record '" + tag + "'");
    }
  }
  if (!have_header) throw ParseError(line_no, "missing 'nodes' header");
  for (NodeId v = 0; v < n; ++v) {
    if (!placed[v]) throw ParseError(line_no, "missing position for node " + std::to_string(v));
  }
  return Topology(n, edges, std::move(positions), range);
}

}  // namespace centrinet
