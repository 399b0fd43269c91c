#include "centrinet/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <thread>

#include "centrinet/errors.hpp"

namespace centrinet {

std::vector<std::size_t> shortest_path_lengths(const Topology& t, NodeId src) {
  std::vector<std::size_t> dist(t.size(), kUnreachable);
  if (src >= t.size()) throw UsageError("source node out of range");
  std::deque<NodeId> frontier{src};
  dist[src] = 0;
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop_front();
    for (NodeId w : t.neighbors(v)) {
      if (dist[w] == kUnreachable) {
        dist[w] = dist[v] + 1;
        frontier.push_back(w);
      }
    }
  }
  return dist;
}

namespace {

void check_pair(const Topology& t, NodeId src, NodeId dst) {
  if (src >= t.size() || dst >= t.size()) throw UsageError("path endpoint out of range");
}

void extend_simple_paths(const Topology& t, NodeId dst, std::size_t max_len, Path& current,
                         std::vector<char>& on_path, std::vector<Path>& out) {
  const NodeId v = current.back();
  if (v == dst) {
    out.push_back(current);
    return;
  }
  if (hops(current) == max_len) return;
  for (NodeId w : t.neighbors(v)) {
    if (on_path[w]) continue;
    on_path[w] = 1;
    current.push_back(w);
    extend_simple_paths(t, dst, max_len, current, on_path, out);
    current.pop_back();
    on_path[w] = 0;
  }
}

}  // namespace

PathSet all_simple_paths(const Topology& t, NodeId src, NodeId dst, std::size_t max_len) {
  check_pair(t, src, dst);
  PathSet result{src, dst, {}};
  if (src == dst) return result;
  Path current{src};
  std::vector<char> on_path(t.size(), 0);
  on_path[src] = 1;
  extend_simple_paths(t, dst, max_len, current, on_path, result.paths);
  std::sort(result.paths.begin(), result.paths.end(), PathOrder{});
  return result;
}

namespace {

// Shortest spur path from `spur` to `dst` that avoids `removed` nodes and the
// first hops in `blocked`, choosing the lexicographically smallest node
// sequence among equal-length candidates. Paths longer than `budget` hops
// are not searched for.
class SpurSearch {
 public:
  explicit SpurSearch(const Topology& t) : t_(t), dist_(t.size()) {}

  std::optional<Path> find(NodeId spur, NodeId dst, const std::vector<char>& removed,
                           const std::vector<NodeId>& blocked, std::size_t budget) {
    if (budget == 0) return std::nullopt;
    std::fill(dist_.begin(), dist_.end(), kUnreachable);
    // BFS from dst; spur is excluded so the greedy walk below never re-enters it.
    dist_[dst] = 0;
    frontier_.assign(1, dst);
    for (std::size_t head = 0; head < frontier_.size(); ++head) {
      const NodeId v = frontier_[head];
      if (dist_[v] + 1 >= budget) continue;  // neighbors would exceed budget - 1
      for (NodeId w : t_.neighbors(v)) {
        if (w == spur || removed[w] || dist_[w] != kUnreachable) continue;
        dist_[w] = dist_[v] + 1;
        frontier_.push_back(w);
      }
    }
    std::size_t best = kUnreachable;
    NodeId first = 0;
    for (NodeId w : t_.neighbors(spur)) {
      if (removed[w] || dist_[w] == kUnreachable) continue;
      if (std::find(blocked.begin(), blocked.end(), w) != blocked.end()) continue;
      if (dist_[w] < best) {
        best = dist_[w];
        first = w;
      }
    }
    if (best == kUnreachable || best + 1 > budget) return std::nullopt;
    Path path{spur, first};
    NodeId v = first;
    while (v != dst) {
      for (NodeId w : t_.neighbors(v)) {
        if (w != spur && !removed[w] && dist_[w] + 1 == dist_[v]) {
          v = w;
          break;
        }
      }
      path.push_back(v);
    }
    return path;
  }

 private:
  const Topology& t_;
  std::vector<std::size_t> dist_;
  std::vector<NodeId> frontier_;
};

}  // namespace

PathSet k_shortest_simple_paths(const Topology& t, NodeId src, NodeId dst, std::size_t k,
                                std::size_t max_len) {
  check_pair(t, src, dst);
  PathSet result{src, dst, {}};
  if (src == dst || max_len == 0) return result;
  const std::size_t limit = k == 0 ? std::numeric_limits<std::size_t>::max() : k;

  SpurSearch search(t);
  std::vector<char> removed(t.size(), 0);
  auto first = search.find(src, dst, removed, {}, max_len);
  if (!first) return result;

  std::vector<Path>& accepted = result.paths;
  std::set<Path, PathOrder> candidates;
  accepted.push_back(std::move(*first));

  while (accepted.size() < limit) {
    const Path& last = accepted.back();
    // Deviate from the newest accepted path at every node but the target.
    for (std::size_t i = 0; i + 1 < last.size(); ++i) {
      const NodeId spur = last[i];
      std::vector<NodeId> blocked;
      for (const Path& p : accepted) {
        if (p.size() > i + 1 && std::equal(last.begin(), last.begin() + i + 1, p.begin())) {
          blocked.push_back(p[i + 1]);
        }
      }
      std::fill(removed.begin(), removed.end(), 0);
      for (std::size_t j = 0; j < i; ++j) removed[last[j]] = 1;
      auto spur_path = search.find(spur, dst, removed, blocked, max_len - i);
      if (!spur_path) continue;
      Path candidate(last.begin(), last.begin() + i);
      candidate.insert(candidate.end(), spur_path->begin(), spur_path->end());
      candidates.insert(std::move(candidate));
    }
    if (candidates.empty()) break;
    accepted.push_back(std::move(candidates.extract(candidates.begin()).value()));
  }
  return result;
}

std::size_t AdmissionPolicy::length_bound(std::size_t geodesic) const {
  std::size_t bound = std::numeric_limits<std::size_t>::max();
  if (length_slack) bound = geodesic + *length_slack;
  if (max_length) bound = std::min(bound, *max_length);
  return bound;
}

InformationMatrix InformationMatrix::scaled(double c) const {
  InformationMatrix out = *this;
  for (double& v : out.info_) v *= c;
  return out;
}

InformationMatrix pairwise_information(const Topology& t, const AdmissionPolicy& policy,
                                       unsigned threads) {
  const std::size_t n = t.size();
  InformationMatrix m(n);
  std::vector<std::vector<std::size_t>> dist(n);
  for (NodeId i = 0; i < n; ++i) dist[i] = shortest_path_lengths(t, i);

  // Workers take source rows round-robin; each entry has exactly one writer.
  auto work = [&](unsigned worker, unsigned stride) {
    for (NodeId i = worker; i < n; i += stride) {
      for (NodeId j = i + 1; j < n; ++j) {
        const std::size_t d = dist[i][j];
        if (d == kUnreachable) {
          m.set(i, j, 0.0, kUnreachable);
          continue;
        }
        const std::size_t bound = std::min(policy.length_bound(d), n - 1);
        if (bound < d) {
          m.set(i, j, 0.0, d);
          continue;
        }
        const PathSet admitted = k_shortest_simple_paths(t, i, j, policy.max_paths, bound);
        double info = 0.0;
        for (const Path& p : admitted.paths) info += 1.0 / static_cast<double>(hops(p));
        m.set(i, j, info, d);
      }
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w, threads);
  }
  for (NodeId i = 0; i < n; ++i) m.set(i, i, 0.0, 0);
  return m;
}

std::vector<double> information_centrality(const InformationMatrix& m) {
  const std::size_t n = m.size();
  std::vector<double> ic(n, 0.0);
  if (n < 2) return ic;
  for (NodeId i = 0; i < n; ++i) {
    double resistance = 0.0;
    for (NodeId j = 0; j < n; ++j) {
      if (j == i) continue;
      const double info = m.info(i, j);
      if (!(info > 0.0)) {
        throw DomainError("no information between nodes " + std::to_string(i) + " and " +
                          std::to_string(j) + "; graph is disconnected");
      }
      resistance += 1.0 / info;
    }
    ic[i] = static_cast<double>(n - 1) / resistance;
  }
  return ic;
}

std::vector<double> betweenness_centrality(const Topology& t) {
  const std::size_t n = t.size();
  std::vector<double> centrality(n, 0.0);
  std::vector<std::size_t> dist(n);
  std::vector<double> sigma(n);
  std::vector<double> delta(n);
  std::vector<NodeId> order;
  order.reserve(n);
  for (NodeId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), kUnreachable);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    order.assign(1, s);
    dist[s] = 0;
    sigma[s] = 1.0;
    for (std::size_t head = 0; head < order.size(); ++head) {
      const NodeId v = order[head];
      for (NodeId w : t.neighbors(v)) {
        if (dist[w] == kUnreachable) {
          dist[w] = dist[v] + 1;
          order.push_back(w);
        }
        if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const NodeId w = *it;
      for (NodeId v : t.neighbors(w)) {
        if (dist[v] != kUnreachable && dist[v] + 1 == dist[w]) {
          delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
      }
      if (w != s) centrality[w] += delta[w];
    }
  }
  // Every unordered pair was visited from both ends.
  for (double& c : centrality) c /= 2.0;
  return centrality;
}

std::vector<double> degree_centrality(const Topology& t) {
  std::vector<double> out(t.size());
  for (NodeId v = 0; v < t.size(); ++v) out[v] = static_cast<double>(t.degree(v));
  return out;
}

std::vector<NodeId> rank_descending(const std::vector<double>& scores) {
  std::vector<NodeId> order(scores.size());
  for (NodeId v = 0; v < order.size(); ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return scores[a] > scores[b]; });
  // Scores that differ only by rounding are ties: chain neighbours closer than
  // kTieTolerance (relative) into one run and order each run by NodeId.
  constexpr double kTieTolerance = 1e-9;
  std::size_t begin = 0;
  while (begin < order.size()) {
    std::size_t end = begin + 1;
    while (end < order.size()) {
      const double hi = scores[order[end - 1]];
      const double lo = scores[order[end]];
      if (hi - lo > kTieTolerance * std::max(std::abs(hi), std::abs(lo))) break;
      ++end;
    }
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
              order.begin() + static_cast<std::ptrdiff_t>(end));
    begin = end;
  }
  return order;
}

std::size_t fraction_count(double fraction, std::size_t n) {
  const auto raw = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(raw, 1, n);
}

std::vector<NodeId> top_fraction(const std::vector<double>& scores, double fraction) {
  if (scores.empty()) throw UsageError("top_fraction needs at least one score");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw UsageError("fraction must lie in (0, 1]");
  }
  std::vector<NodeId> ranked = rank_descending(scores);
  ranked.resize(fraction_count(fraction, scores.size()));
  return ranked;
}

std::vector<std::size_t> CentralityReport::information_rank_of() const {
  std::vector<std::size_t> rank(rank_information.size());
  for (std::size_t r = 0; r < rank_information.size(); ++r) rank[rank_information[r]] = r + 1;
  return rank;
}

CentralityReport analyze_centrality(const Topology& t, const AdmissionPolicy& policy,
                                    unsigned threads) {
  CentralityReport report;
  report.policy = policy;
  const auto info = information_centrality(pairwise_information(t, policy, threads));
  const auto between = betweenness_centrality(t);
  const auto degree = degree_centrality(t);
  report.scores.resize(t.size());
  for (NodeId v = 0; v < t.size(); ++v) report.scores[v] = {info[v], between[v], degree[v]};
  report.rank_information = rank_descending(info);
  report.rank_betweenness = rank_descending(between);
  report.rank_degree = rank_descending(degree);
  return report;
}

}  // namespace centrinet
