#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <span>
#include <tuple>
#include <vector>

#include "chainscope/disjoint_sets.hpp"
#include "chainscope/error.hpp"
#include "chainscope/metric_space.hpp"

namespace chainscope {

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

/// An eps-chain p_0, ..., p_n: consecutive distances strictly below eps.
struct ChainWitness {
  std::vector<std::size_t> indices;
  double eps = 0.0;

  /// Hop count n.
  std::size_t length() const noexcept { return indices.empty() ? 0 : indices.size() - 1; }
};

/// Strict eps-adjacency graph over a metric space: i ~ j iff i != j and
/// d(i,j) < eps. Components are the eps-chainable components B^inf_eps.
///
/// The graph keeps a pointer to the space; the space must outlive it.
/// Construction is the only mutation apart from the lazily filled
/// eccentricity table, which is written once under std::call_once.
class ChainGraph {
 public:
  ChainGraph(const MetricSpace& space, double eps) : space_(&space), eps_(eps), lazy_(std::make_unique<Lazy>()) {
    detail::require_positive_eps(eps);
    const std::size_t n = space.size();
    adjacency_.resize(n);
    DisjointSets sets(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (space.raw_distance(i, j) < eps) {
          adjacency_[i].push_back(static_cast<std::uint32_t>(j));
          adjacency_[j].push_back(static_cast<std::uint32_t>(i));
          sets.unite(i, j);
        }
      }
    }
    // Dense component ids ordered by smallest member.
    component_of_.assign(n, kUnreachable);
    std::vector<std::size_t> root_to_id(n, kUnreachable);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = sets.find(i);
      if (root_to_id[r] == kUnreachable) {
        root_to_id[r] = members_.size();
        members_.emplace_back();
      }
      component_of_[i] = root_to_id[r];
      members_[root_to_id[r]].push_back(i);
    }
  }

  ChainGraph(ChainGraph&&) noexcept = default;
  ChainGraph& operator=(ChainGraph&&) noexcept = default;

  const MetricSpace& space() const noexcept { return *space_; }
  double eps() const noexcept { return eps_; }
  std::size_t size() const noexcept { return adjacency_.size(); }

  std::span<const std::uint32_t> neighbors(std::size_t i) const { return adjacency_.at(i); }

  std::size_t component_count() const noexcept { return members_.size(); }
  std::size_t component_of(std::size_t i) const {
    space_->check_index(i);
    return component_of_[i];
  }
  /// Sorted members of component c.
  std::span<const std::size_t> component_members(std::size_t c) const { return members_.at(c); }

  /// BFS hop distances from source, truncated at max_depth; unreached
  /// entries are kUnreachable.
  std::vector<std::size_t> hop_distances(std::size_t source, std::size_t max_depth = kUnreachable) const {
    space_->check_index(source);
    std::vector<std::size_t> dist(size(), kUnreachable);
    std::vector<std::size_t> frontier{source};
    dist[source] = 0;
    std::size_t depth = 0;
    while (!frontier.empty() && depth < max_depth) {
      std::vector<std::size_t> next;
      for (std::size_t u : frontier) {
        for (std::uint32_t v : adjacency_[u]) {
          if (dist[v] == kUnreachable) {
            dist[v] = depth + 1;
            next.push_back(v);
          }
        }
      }
      frontier = std::move(next);
      ++depth;
    }
    return dist;
  }

  /// Hop eccentricity of every point within its own component.
  std::span<const std::size_t> eccentricities() const {
    std::call_once(lazy_->once, [this] {
      lazy_->eccentricity.resize(size());
      for (std::size_t i = 0; i < size(); ++i) {
        const auto dist = hop_distances(i);
        std::size_t ecc = 0;
        for (std::size_t d : dist)
          if (d != kUnreachable) ecc = std::max(ecc, d);
        lazy_->eccentricity[i] = ecc;
      }
    });
    return lazy_->eccentricity;
  }

 private:
  struct Lazy {
    std::once_flag once;
    std::vector<std::size_t> eccentricity;
  };

  const MetricSpace* space_;
  double eps_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
  std::vector<std::size_t> component_of_;
  std::vector<std::vector<std::size_t>> members_;
  std::unique_ptr<Lazy> lazy_;
};

inline ChainGraph build_chain_graph(const MetricSpace& space, double eps) { return ChainGraph(space, eps); }

/// B^m_eps(x): points joined to x by an eps-chain of length at most m.
/// Chains may repeat points, so the layers are nested in m.
inline std::vector<std::size_t> ball_layers(const ChainGraph& graph, std::size_t x, std::size_t m) {
  if (m < 1) throw Error(Errc::non_positive_length, "ball layer count m must be >= 1");
  const auto dist = graph.hop_distances(x, m);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (dist[i] != kUnreachable) out.push_back(i);
  return out;
}

/// B^inf_eps(x), sorted.
inline std::vector<std::size_t> chain_component(const ChainGraph& graph, std::size_t x) {
  const auto members = graph.component_members(graph.component_of(x));
  return {members.begin(), members.end()};
}

/// Shortest-hop eps-chain from x to y, or nullopt when none exists.
inline std::optional<ChainWitness> find_chain(const ChainGraph& graph, std::size_t x, std::size_t y) {
  graph.space().check_index(x);
  graph.space().check_index(y);
  if (graph.component_of(x) != graph.component_of(y)) return std::nullopt;
  std::vector<std::size_t> parent(graph.size(), kUnreachable);
  std::queue<std::size_t> queue;
  parent[x] = x;
  queue.push(x);
  while (!queue.empty() && parent[y] == kUnreachable) {
    const std::size_t u = queue.front();
    queue.pop();
    for (std::uint32_t v : graph.neighbors(u)) {
      if (parent[v] == kUnreachable) {
        parent[v] = u;
        queue.push(v);
      }
    }
  }
  ChainWitness w{{}, graph.eps()};
  for (std::size_t at = y; at != x; at = parent[at]) w.indices.push_back(at);
  w.indices.push_back(x);
  std::reverse(w.indices.begin(), w.indices.end());
  return w;
}

inline bool is_chainable(const MetricSpace& space, double eps) {
  return ChainGraph(space, eps).component_count() == 1;
}

/// Finite-scale Bourbaki profile at one scale: k is the number of chain
/// components (the fewest B^inf centers that cover), m_star the smallest m
/// such that one B^m ball per component covers it.
struct CoveringProfile {
  double eps = 0.0;
  std::size_t components = 0;
  std::size_t m_star = 0;
  /// One minimal-eccentricity center per component.
  std::vector<std::size_t> centers;
};

inline CoveringProfile covering_profile(const ChainGraph& graph) {
  CoveringProfile out{graph.eps(), graph.component_count(), 0, {}};
  const auto ecc = graph.eccentricities();
  for (std::size_t c = 0; c < graph.component_count(); ++c) {
    std::size_t best = kUnreachable, center = 0;
    for (std::size_t i : graph.component_members(c)) {
      if (ecc[i] < best) {
        best = ecc[i];
        center = i;
      }
    }
    out.centers.push_back(center);
    out.m_star = std::max(out.m_star, best);
  }
  return out;
}

inline CoveringProfile covering_profile(const MetricSpace& space, double eps) {
  return covering_profile(ChainGraph(space, eps));
}

enum class DiscretenessMode { in_ambient, in_itself };

/// How per-point thresholds are reported: snapped down to a geometric grid
/// starting at the space diameter, or exactly (the threshold is always a
/// realized distance).
struct ThresholdScan {
  enum class Kind { geometric_grid, exact_breakpoints };
  Kind kind = Kind::geometric_grid;
  std::size_t grid_count = 40;
  double grid_ratio = 0.8;
};

struct ChainDiscreteness {
  /// Per subset point: sup of delta with B^inf_delta(x) meeting no other
  /// subset point (+infinity for a singleton subset).
  std::vector<double> thresholds;
  double uniform = kInfinity;
};

namespace detail {

inline void require_subset(const MetricSpace& space, std::span<const std::size_t> subset) {
  if (subset.empty()) throw Error(Errc::empty_subset, "subset must be nonempty");
  for (std::size_t i : subset) space.check_index(i);
}

/// For each marked point, the minimax (bottleneck) path weight to the
/// nearest other marked point in the complete distance graph. At scale
/// delta the point shares a component with another marked point iff
/// delta exceeds this value.
inline std::vector<double> bottleneck_to_nearest_marked(const MetricSpace& space,
                                                        std::span<const std::size_t> marked) {
  const std::size_t n = space.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(space.raw_distance(i, j), i, j);
  std::sort(edges.begin(), edges.end());

  std::vector<double> out(marked.size(), kInfinity);
  // Per root: marked count and marked points still without a threshold.
  std::vector<std::size_t> count(n, 0);
  std::vector<std::vector<std::size_t>> pending(n);
  for (std::size_t s = 0; s < marked.size(); ++s) {
    ++count[marked[s]];
    pending[marked[s]].push_back(s);
  }
  DisjointSets sets(n);
  for (const auto& [w, i, j] : edges) {
    const std::size_t ri = sets.find(i), rj = sets.find(j);
    if (ri == rj) continue;
    const std::size_t total = count[ri] + count[rj];
    const std::size_t root = sets.unite(ri, rj);
    const std::size_t other = root == ri ? rj : ri;
    if (total >= 2) {
      for (std::size_t s : pending[ri]) out[s] = w;
      for (std::size_t s : pending[rj]) out[s] = w;
      pending[ri].clear();
      pending[rj].clear();
    } else {
      pending[root].insert(pending[root].end(), pending[other].begin(), pending[other].end());
      pending[other].clear();
    }
    count[root] = total;
  }
  // Duplicate marked indices would never merge; they share a point.
  for (std::size_t s = 0; s < marked.size(); ++s)
    for (std::size_t t = s + 1; t < marked.size(); ++t)
      if (marked[s] == marked[t]) out[s] = out[t] = 0.0;
  return out;
}

}  // namespace detail

/// Chain-discreteness thresholds of subset. In in-itself mode chains may only
/// pass through subset points; in in-ambient mode through any point.
inline ChainDiscreteness chain_discreteness(const MetricSpace& space, std::span<const std::size_t> subset,
                                            DiscretenessMode mode, ThresholdScan scan = {}) {
  detail::require_subset(space, subset);
  std::vector<double> exact;
  if (mode == DiscretenessMode::in_ambient) {
    exact = detail::bottleneck_to_nearest_marked(space, subset);
  } else {
    const MetricSpace sub = space.subspace(subset);
    std::vector<std::size_t> all(subset.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    exact = detail::bottleneck_to_nearest_marked(sub, all);
  }
  ChainDiscreteness out;
  if (scan.kind == ThresholdScan::Kind::exact_breakpoints) {
    out.thresholds = exact;
  } else {
    const double top = space.diameter();
    for (double b : exact) {
      double snapped = 0.0;
      if (std::isinf(b)) {
        snapped = kInfinity;
      } else {
        double candidate = top;
        for (std::size_t g = 0; g < scan.grid_count; ++g, candidate *= scan.grid_ratio) {
          if (candidate <= b) {
            snapped = candidate;
            break;
          }
        }
      }
      out.thresholds.push_back(snapped);
    }
  }
  for (double t : out.thresholds) out.uniform = std::min(out.uniform, t);
  return out;
}

/// True iff distinct subset points lie in distinct chain components at scale
/// delta (uniform chain discreteness witnessed at delta).
inline bool uniformly_chain_discrete_at(const MetricSpace& space, std::span<const std::size_t> subset,
                                        DiscretenessMode mode, double delta) {
  detail::require_subset(space, subset);
  std::vector<std::size_t> comps;
  if (mode == DiscretenessMode::in_ambient) {
    const ChainGraph g(space, delta);
    for (std::size_t i : subset) comps.push_back(g.component_of(i));
  } else {
    const MetricSpace sub = space.subspace(subset);
    const ChainGraph g(sub, delta);
    for (std::size_t i = 0; i < subset.size(); ++i) comps.push_back(g.component_of(i));
  }
  std::sort(comps.begin(), comps.end());
  return std::adjacent_find(comps.begin(), comps.end()) == comps.end();
}

/// d(C+_eps, C-_eps) where C?_eps keeps the points of C? at distance >= eps
/// from C+ ∩ C-; +infinity when either trimmed side is empty.
inline double u_placed_gap(const MetricSpace& space, std::span<const std::size_t> cplus,
                           std::span<const std::size_t> cminus, double eps) {
  detail::require_positive_eps(eps);
  const std::size_t n = space.size();
  std::vector<char> in_plus(n, 0), in_minus(n, 0);
  for (std::size_t i : cplus) {
    space.check_index(i);
    in_plus[i] = 1;
  }
  for (std::size_t i : cminus) {
    space.check_index(i);
    in_minus[i] = 1;
  }
  std::vector<std::size_t> both;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_plus[i] && !in_minus[i]) {
      throw Error(Errc::not_a_cover, "point " + std::to_string(i) + " is in neither set");
    }
    if (in_plus[i] && in_minus[i]) both.push_back(i);
  }
  auto dist_to_both = [&](std::size_t x) {
    double best = kInfinity;
    for (std::size_t b : both) best = std::min(best, space.raw_distance(x, b));
    return best;
  };
  std::vector<std::size_t> plus_trim, minus_trim;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_plus[i] && dist_to_both(i) >= eps) plus_trim.push_back(i);
    if (in_minus[i] && dist_to_both(i) >= eps) minus_trim.push_back(i);
  }
  double gap = kInfinity;
  for (std::size_t a : plus_trim)
    for (std::size_t b : minus_trim) gap = std::min(gap, space.raw_distance(a, b));
  return gap;
}

}  // namespace chainscope
