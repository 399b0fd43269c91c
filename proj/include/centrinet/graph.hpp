#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace centrinet {

using NodeId = std::uint32_t;

struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

using Edge = std::pair<NodeId, NodeId>;

/// Static undirected mesh. Immutable after construction; neighbor lists are
/// kept in ascending NodeId order so every traversal is deterministic.
class Topology {
 public:
  Topology() = default;

  /// Arbitrary edge set over `n` nodes. Edges may be given in any order or
  /// orientation; self-loops and duplicates throw UsageError.
  Topology(std::size_t n, std::span<const Edge> edges, std::vector<Position> positions = {},
           double radio_range = 0.0);

  std::size_t size() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// Edges as (u, v) with u < v in ascending lexicographic order.
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<Position>& positions() const noexcept { return positions_; }
  double radio_range() const noexcept { return radio_range_; }

  std::span<const NodeId> neighbors(NodeId v) const;
  bool has_edge(NodeId u, NodeId v) const;
  std::size_t degree(NodeId v) const { return neighbors(v).size(); }

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<Edge> edges_;
  std::vector<Position> positions_;
  double radio_range_ = 0.0;
};

/// `n` positions uniform over [0,width]x[0,height], quantized to 1e-6 m so the
/// text serialization is lossless.
std::vector<Position> random_positions(std::size_t n, double width, double height,
                                       std::uint64_t seed);

/// Unit-disk graph: edge iff Euclidean distance <= radio_range.
Topology build_unit_disk(std::vector<Position> positions, double radio_range);

bool is_connected(const Topology& t);

/// Positions are resampled with derived seeds until the unit-disk graph is
/// connected; throws ConfigError after `max_attempts` failures.
Topology connected_unit_disk(std::size_t n, double width, double height, double radio_range,
                             std::uint64_t seed, int max_attempts = 100);

void save_topology(const Topology& t, std::ostream& out);
Topology load_topology(std::istream& in);

}  // namespace centrinet
