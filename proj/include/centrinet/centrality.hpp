#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "centrinet/graph.hpp"

namespace centrinet {

/// A simple path as its node sequence, source first.
using Path = std::vector<NodeId>;

inline std::size_t hops(const Path& p) { return p.empty() ? 0 : p.size() - 1; }

/// Canonical path order: shorter first, then lexicographic node sequence.
struct PathOrder {
  bool operator()(const Path& a, const Path& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

/// Simple paths between one pair, sorted by PathOrder, no duplicates.
struct PathSet {
  NodeId src = 0;
  NodeId dst = 0;
  std::vector<Path> paths;
};

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

/// BFS hop counts from `src`; kUnreachable marks nodes in other components.
std::vector<std::size_t> shortest_path_lengths(const Topology& t, NodeId src);

/// Exhaustive DFS enumeration of simple paths of at most `max_len` hops.
/// Exponential; meant as a reference for small graphs.
PathSet all_simple_paths(const Topology& t, NodeId src, NodeId dst, std::size_t max_len);

/// Yen's loopless k-shortest paths restricted to `max_len` hops. The result is
/// exactly the first `k` paths of the PathOrder ordering of all simple paths
/// (fewer if fewer exist). `k == 0` means unbounded.
PathSet k_shortest_simple_paths(const Topology& t, NodeId src, NodeId dst, std::size_t k,
                                std::size_t max_len);

/// Which routes between a pair contribute information.
struct AdmissionPolicy {
  /// Maximum paths per pair; 0 = unbounded.
  std::size_t max_paths = 5;
  /// Admit paths up to (geodesic length + slack) hops.
  std::optional<std::size_t> length_slack = 2;
  /// Absolute hop cap, applied together with the slack.
  std::optional<std::size_t> max_length;

  static AdmissionPolicy geodesics_only() { return {0, 0, std::nullopt}; }
  /// Every simple path up to `max_length` hops.
  static AdmissionPolicy all_paths(std::size_t max_length) {
    return {0, std::nullopt, max_length};
  }

  std::size_t length_bound(std::size_t geodesic) const;
};

/// Pairwise information I and hop distance d, both symmetric n x n, row-major.
class InformationMatrix {
 public:
  explicit InformationMatrix(std::size_t n)
      : n_(n), info_(n * n, 0.0), dist_(n * n, kUnreachable) {}

  std::size_t size() const noexcept { return n_; }
  double info(NodeId i, NodeId j) const { return info_[i * n_ + j]; }
  std::size_t distance(NodeId i, NodeId j) const { return dist_[i * n_ + j]; }

  void set(NodeId i, NodeId j, double info, std::size_t dist) {
    info_[i * n_ + j] = info_[j * n_ + i] = info;
    dist_[i * n_ + j] = dist_[j * n_ + i] = dist;
  }

  /// Every information entry multiplied by `c`.
  InformationMatrix scaled(double c) const;

 private:
  std::size_t n_;
  std::vector<double> info_;
  std::vector<std::size_t> dist_;
};

/// I[i][j] = sum over admitted paths p of 1/hops(p). Pairs are evaluated on
/// `threads` workers; the result does not depend on the thread count.
InformationMatrix pairwise_information(const Topology& t, const AdmissionPolicy& policy,
                                       unsigned threads = 1);

/// Harmonic mean of a node's information with every other node:
/// IC(i) = (n-1) / sum_{j != i} 1/I[i][j]. Throws DomainError when any pair
/// carries no information.
std::vector<double> information_centrality(const InformationMatrix& m);

/// Shortest-path betweenness with fractional counting over all geodesics,
/// unnormalized, each unordered pair counted once.
std::vector<double> betweenness_centrality(const Topology& t);

std::vector<double> degree_centrality(const Topology& t);

/// All nodes by descending score, ties by ascending NodeId. Scores within a
/// relative 1e-9 of each other count as tied.
std::vector<NodeId> rank_descending(const std::vector<double>& scores);

/// The ceil(fraction * n) highest-scoring nodes in rank order.
std::vector<NodeId> top_fraction(const std::vector<double>& scores, double fraction);

/// ceil(fraction * n), tolerant of binary rounding in the product
/// (0.05 * 200 is exactly 10 origins, not 11).
std::size_t fraction_count(double fraction, std::size_t n);

struct NodeScores {
  double information = 0.0;
  double betweenness = 0.0;
  double degree = 0.0;
};

struct CentralityReport {
  std::vector<NodeScores> scores;
  std::vector<NodeId> rank_information;
  std::vector<NodeId> rank_betweenness;
  std::vector<NodeId> rank_degree;
  AdmissionPolicy policy;

  /// 1-based rank of each node under information centrality.
  std::vector<std::size_t> information_rank_of() const;
};

CentralityReport analyze_centrality(const Topology& t, const AdmissionPolicy& policy,
                                    unsigned threads = 1);

}  // namespace centrinet
