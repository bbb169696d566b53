#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chainscope/chain_graph.hpp"
#include "chainscope/error.hpp"
#include "chainscope/metric_space.hpp"
#include "chainscope/sequences.hpp"
#include "chainscope/sparse_vector.hpp"

namespace chainscope {

/// A real-valued function on a finite metric space: one finite value per
/// point index. The space must outlive the function.
class ScalarFunction {
 public:
  ScalarFunction(const MetricSpace& space, std::vector<double> values) : space_(&space), values_(std::move(values)) {
    if (values_.size() != space.size()) {
      throw Error(Errc::malformed_input, "function has " + std::to_string(values_.size()) + " values for " +
                                             std::to_string(space.size()) + " points");
    }
    for (double v : values_)
      if (!std::isfinite(v)) throw Error(Errc::malformed_input, "function values must be finite");
  }

  template <class Fn>
  static ScalarFunction tabulate(const MetricSpace& space, Fn&& fn) {
    std::vector<double> values(space.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = fn(i);
    return {space, std::move(values)};
  }

  static ScalarFunction constant(const MetricSpace& space, double c) {
    return {space, std::vector<double>(space.size(), c)};
  }

  const MetricSpace& space() const noexcept { return *space_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_.at(i); }

 private:
  const MetricSpace* space_;
  std::vector<double> values_;
};

enum class ModulusKind { lipschitz, lits, local, cauchy_seq, qc_seq };

inline std::string modulus_name(ModulusKind kind) {
  switch (kind) {
    case ModulusKind::lipschitz: return "lipschitz";
    case ModulusKind::lits: return "lits";
    case ModulusKind::local: return "local";
    case ModulusKind::cauchy_seq: return "cauchy-seq";
    case ModulusKind::qc_seq: return "qc-seq";
  }
  return "unknown";
}

/// A supremum of difference quotients together with the pair realizing it.
/// For the sequence kinds the witness holds prefix positions, otherwise point
/// indices. An empty pair set gives constant 0 and no witness.
struct ModulusReport {
  ModulusKind kind = ModulusKind::lipschitz;
  double constant = 0.0;
  std::optional<double> scale;
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

namespace detail {

/// |f(x) - f(y)| / d(x, y) with the conventions: equal values give 0 even at
/// distance 0, differing values at distance 0 give +infinity.
inline double difference_quotient(double df, double d) {
  if (df == 0.0) return 0.0;
  if (d == 0.0) return kInfinity;
  return df / d;
}

struct RatioMax {
  double best = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> at;

  void offer(double r, std::size_t a, std::size_t b) {
    if (r > best) {
      best = r;
      at = {a, b};
    }
  }
};

}  // namespace detail

inline ModulusReport lipschitz_constant(const ScalarFunction& f) {
  const MetricSpace& X = f.space();
  if (X.size() < 2) throw Error(Errc::degenerate_space, "a Lipschitz constant needs at least two points");
  detail::RatioMax m;
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = i + 1; j < X.size(); ++j)
      m.offer(detail::difference_quotient(std::abs(f[i] - f[j]), X.raw_distance(i, j)), i, j);
  return {ModulusKind::lipschitz, m.best, std::nullopt, m.at};
}

/// Lipschitz-in-the-small modulus: the supremum over pairs with d < delta.
inline ModulusReport lits_modulus(const ScalarFunction& f, double delta) {
  detail::require_positive_eps(delta, "delta");
  const MetricSpace& X = f.space();
  if (X.size() < 2) throw Error(Errc::degenerate_space, "a Lipschitz modulus needs at least two points");
  detail::RatioMax m;
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = i + 1; j < X.size(); ++j) {
      const double d = X.raw_distance(i, j);
      if (d < delta) m.offer(detail::difference_quotient(std::abs(f[i] - f[j]), d), i, j);
    }
  return {ModulusKind::lits, m.best, delta, m.at};
}

enum class SeqMode { consecutive, all_pairs };

/// Difference-quotient supremum along a prefix: consecutive pairs give the
/// quasi-Cauchy-Lipschitz witness, all pairs the Lipschitz constant on the
/// prefix range.
inline ModulusReport seq_lipschitz_constant(const ScalarFunction& f, const SequencePrefix& prefix, SeqMode mode) {
  if (prefix.size() < 2) throw Error(Errc::short_prefix, "sequence modulus needs at least two points");
  if (&prefix.space() != &f.space()) throw Error(Errc::bad_param, "prefix and function live on different spaces");
  detail::RatioMax m;
  auto offer = [&](std::size_t a, std::size_t b) {
    m.offer(detail::difference_quotient(std::abs(f[prefix[a]] - f[prefix[b]]), prefix.gap(a, b)), a, b);
  };
  if (mode == SeqMode::consecutive) {
    for (std::size_t k = 0; k + 1 < prefix.size(); ++k) offer(k, k + 1);
  } else {
    for (std::size_t k = 0; k < prefix.size(); ++k)
      for (std::size_t l = k + 1; l < prefix.size(); ++l) offer(k, l);
  }
  const auto kind = mode == SeqMode::consecutive ? ModulusKind::qc_seq : ModulusKind::cauchy_seq;
  return {kind, m.best, std::nullopt, m.at};
}

struct LocalLipschitzProfile {
  double delta = 0.0;
  /// Lipschitz constant of f on the open ball B_delta(x), per point x.
  std::vector<double> constants;

  double max() const {
    double best = 0.0;
    for (double c : constants) best = std::max(best, c);
    return best;
  }
  bool has_infinite() const {
    return std::any_of(constants.begin(), constants.end(), [](double c) { return std::isinf(c); });
  }
};

inline LocalLipschitzProfile local_lipschitz_profile(const ScalarFunction& f, double delta) {
  detail::require_positive_eps(delta, "delta");
  const MetricSpace& X = f.space();
  LocalLipschitzProfile out{delta, std::vector<double>(X.size(), 0.0)};
  std::vector<std::size_t> ball;
  for (std::size_t x = 0; x < X.size(); ++x) {
    ball.clear();
    for (std::size_t y = 0; y < X.size(); ++y)
      if (X.raw_distance(x, y) < delta) ball.push_back(y);
    double best = 0.0;
    for (std::size_t a = 0; a < ball.size(); ++a)
      for (std::size_t b = a + 1; b < ball.size(); ++b)
        best = std::max(best, detail::difference_quotient(std::abs(f[ball[a]] - f[ball[b]]),
                                                          X.raw_distance(ball[a], ball[b])));
    out.constants[x] = best;
  }
  return out;
}

// ---- ward falsification ----------------------------------------------------

struct WardSearch {
  std::size_t budget = 64;
  std::size_t walk_length = 200;
  std::uint64_t seed = 0x5eedULL;
  /// Schedule the witness prefix must pass; default_for(diameter, length) when absent.
  std::optional<ToleranceSchedule> schedule;
};

struct WardResult {
  bool found = false;
  std::vector<std::size_t> prefix;  // witness walk (point indices)
  std::size_t position = 0;         // offending consecutive pair (position, position + 1)
  double image_gap = 0.0;
  double domain_gap = 0.0;
  std::size_t evaluations = 0;
  ToleranceSchedule schedule;
};

/// Searches nearest-neighbour walks for a prefix that passes the
/// quasi-Cauchy test at the schedule while some consecutive image gap at or
/// after the last stage start is at least eps_img. Walks first start from
/// every point in index order with smallest-index tie breaking, then from
/// seeded random points with random tie breaking. A found prefix is a
/// certified falsification of ward continuity at this scale; running out of
/// budget proves nothing.
inline WardResult ward_falsifier(const ScalarFunction& f, double eps_img, const WardSearch& search = {}) {
  detail::require_positive_eps(eps_img, "eps_img");
  if (search.budget < 1) throw Error(Errc::bad_param, "ward search budget must be >= 1");
  const MetricSpace& X = f.space();
  const std::size_t n = X.size();
  WardResult out;
  if (n < 2) return out;

  std::size_t length = std::max<std::size_t>(2, std::min(search.walk_length, n));
  if (search.schedule) length = std::max(length, search.schedule->stages().back().start + 2);
  out.schedule = search.schedule ? *search.schedule : ToleranceSchedule::default_for(X.diameter(), length);
  const std::size_t tail = out.schedule.stages().back().start;

  // Nearest-neighbour candidates of every point.
  std::vector<std::vector<std::size_t>> nearest(n);
  for (std::size_t x = 0; x < n; ++x) {
    const double iso = isolation(X, x);
    for (std::size_t y = 0; y < n; ++y)
      if (y != x && X.raw_distance(x, y) <= iso * (1.0 + 1e-9)) nearest[x].push_back(y);
  }

  std::mt19937_64 rng(search.seed);
  std::vector<char> seen(n);
  for (std::size_t attempt = 0; attempt < search.budget; ++attempt) {
    const bool greedy = attempt < n;
    std::size_t at = greedy ? attempt : std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<std::size_t> walk{at};
    seen[at] = 1;
    std::vector<std::size_t> pool;
    while (walk.size() < length) {
      pool.clear();
      for (std::size_t y : nearest[at])
        if (!seen[y]) pool.push_back(y);
      if (pool.empty()) pool = nearest[at];
      at = greedy ? pool.front() : pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      seen[at] = 1;
      walk.push_back(at);
    }
    ++out.evaluations;
    const SequencePrefix prefix(X, walk);
    if (!quasi_cauchy_test(prefix, out.schedule).consistent()) continue;
    for (std::size_t k = tail; k + 1 < walk.size(); ++k) {
      const double gap = std::abs(f[walk[k + 1]] - f[walk[k]]);
      if (gap >= eps_img) {
        out.found = true;
        out.prefix = std::move(walk);
        out.position = k;
        out.image_gap = gap;
        out.domain_gap = prefix.gap(k, k + 1);
        return out;
      }
    }
  }
  return out;
}

// ---- family continuity checks ----------------------------------------------

/// Point x, family member and ball partner y with |g(y) - g(x)| >= eps.
struct EquiWitness {
  std::size_t point = 0;
  std::size_t member = 0;
  std::size_t partner = 0;
  double deviation = 0.0;
};

struct EquiReport {
  bool passes = false;
  /// Per point x: the supremum of working radii for the certificates in use,
  /// i.e. the nearest distance at which some certificate deviates by >= eps.
  std::vector<double> delta;
  /// Per family member f: index of its certificate g_f, kUnreachable if none.
  std::vector<std::size_t> certificate;
  std::optional<EquiWitness> witness;
};

namespace detail {

inline const MetricSpace& common_space(std::span<const ScalarFunction> family) {
  if (family.empty()) throw Error(Errc::empty_family, "function family is empty");
  for (const ScalarFunction& g : family)
    if (&g.space() != &family.front().space())
      throw Error(Errc::bad_param, "family members live on different spaces");
  return family.front().space();
}

/// Worst deviation |g(y) - g(x)| over y with d(x, y) < radius.
inline EquiWitness worst_deviation(const ScalarFunction& g, std::size_t member, std::size_t x, double radius) {
  EquiWitness w{x, member, x, 0.0};
  const MetricSpace& X = g.space();
  for (std::size_t y = 0; y < X.size(); ++y) {
    if (X.raw_distance(x, y) < radius) {
      const double dev = std::abs(g[y] - g[x]);
      if (dev > w.deviation) {
        w.deviation = dev;
        w.partner = y;
      }
    }
  }
  return w;
}

/// Nearest distance from x to a point where g deviates from g(x) by >= eps.
inline double working_radius(const ScalarFunction& g, std::size_t x, double eps) {
  double best = kInfinity;
  for (std::size_t y = 0; y < g.size(); ++y)
    if (std::abs(g[y] - g[x]) >= eps) best = std::min(best, g.space().raw_distance(x, y));
  return best;
}

inline bool works_everywhere(const ScalarFunction& g, double eps, double delta_floor) {
  for (std::size_t x = 0; x < g.size(); ++x)
    if (working_radius(g, x, eps) < delta_floor) return false;
  return true;
}

/// Shared core: members grouped into classes, each class needs one member
/// that works at every point with radius delta_floor.
inline EquiReport classwise_check(std::span<const ScalarFunction> family, double eps, double delta_floor,
                                  const std::vector<std::vector<std::size_t>>& classes,
                                  std::optional<std::size_t> only_point) {
  const MetricSpace& X = family.front().space();
  EquiReport out;
  out.passes = true;
  out.certificate.assign(family.size(), kUnreachable);
  for (const auto& members : classes) {
    std::optional<std::size_t> cert;
    for (std::size_t m : members) {
      bool ok = true;
      if (only_point) {
        ok = working_radius(family[m], *only_point, eps) >= delta_floor;
      } else {
        ok = works_everywhere(family[m], eps, delta_floor);
      }
      if (ok) {
        cert = m;
        break;
      }
    }
    if (cert) {
      for (std::size_t m : members) out.certificate[m] = *cert;
      continue;
    }
    out.passes = false;
    // Worst offender over the class at the checked points.
    for (std::size_t m : members) {
      for (std::size_t x = 0; x < X.size(); ++x) {
        if (only_point && x != *only_point) continue;
        const EquiWitness w = worst_deviation(family[m], m, x, delta_floor);
        if (w.deviation >= eps && (!out.witness || w.deviation > out.witness->deviation)) out.witness = w;
      }
    }
  }
  // Members without a certificate are measured by themselves.
  std::vector<std::size_t> used;
  for (std::size_t m = 0; m < family.size(); ++m)
    used.push_back(out.certificate[m] == kUnreachable ? m : out.certificate[m]);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  out.delta.assign(X.size(), kInfinity);
  for (std::size_t x = 0; x < X.size(); ++x)
    for (std::size_t g : used) out.delta[x] = std::min(out.delta[x], working_radius(family[g], x, eps));
  return out;
}

inline MetricSpace family_space(std::span<const ScalarFunction> family) {
  const MetricSpace& X = common_space(family);
  FunctionSup data{X.size(), {}};
  data.values.reserve(family.size() * X.size());
  for (const ScalarFunction& g : family) data.values.insert(data.values.end(), g.values().begin(), g.values().end());
  return build_space(std::move(data), X.tol());
}

}  // namespace detail

/// Equi-chain continuity at eps: every member f delegates to a certificate
/// g_f in f's eps-chain component (sup metric on the family), fixed per
/// (f, eps), whose deviation on every ball of radius delta_floor stays below
/// eps. The floor stands in for "some delta > 0", which finite data would
/// otherwise satisfy trivially with balls that are singletons.
inline EquiReport equi_chain_continuity_check(std::span<const ScalarFunction> family, double eps,
                                              double delta_floor) {
  detail::require_positive_eps(eps);
  detail::require_positive_eps(delta_floor, "delta_floor");
  detail::common_space(family);
  const MetricSpace fam = detail::family_space(family);
  const ChainGraph graph(fam, eps);
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t c = 0; c < graph.component_count(); ++c) {
    const auto members = graph.component_members(c);
    classes.emplace_back(members.begin(), members.end());
  }
  return detail::classwise_check(family, eps, delta_floor, classes, std::nullopt);
}

/// Plain equicontinuity at eps with radius delta_floor: every member must
/// itself stay within eps on the balls, at every point or only at the given one.
inline EquiReport equicontinuity_check(std::span<const ScalarFunction> family, double eps, double delta_floor,
                                       std::optional<std::size_t> at = std::nullopt) {
  detail::require_positive_eps(eps);
  detail::require_positive_eps(delta_floor, "delta_floor");
  const MetricSpace& X = detail::common_space(family);
  if (at) X.check_index(*at);
  std::vector<std::vector<std::size_t>> classes(family.size());
  for (std::size_t m = 0; m < family.size(); ++m) classes[m] = {m};
  return detail::classwise_check(family, eps, delta_floor, classes, at);
}

struct TailReport {
  bool passes = false;
  /// Per member x: index of y in x's eps-component with tail p-mass beyond
  /// n0 below eps^p, kUnreachable when none exists.
  std::vector<std::size_t> certificate;
  std::optional<std::size_t> failing;
};

/// Chain-escape tail criterion in l^p: each member joins, by an eps-chain
/// inside the family, some member whose tail beyond coordinate n0 has p-mass
/// below eps^p. Members that qualify certify themselves.
inline TailReport lp_tail_criterion(std::span<const SparseVector> family, double p, double eps, std::size_t n0) {
  if (family.empty()) throw Error(Errc::empty_family, "vector family is empty");
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(Errc::bad_param, "p must be finite and >= 1");
  detail::require_positive_eps(eps);
  const MetricSpace space = build_space(PNormSparse{p, {family.begin(), family.end()}});
  const ChainGraph graph(space, eps);
  const double bound = std::pow(eps, p);
  std::vector<double> mass(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) mass[i] = family[i].tail_mass(n0, p);

  TailReport out{true, std::vector<std::size_t>(family.size(), kUnreachable), std::nullopt};
  for (std::size_t x = 0; x < family.size(); ++x) {
    if (mass[x] < bound) {
      out.certificate[x] = x;
      continue;
    }
    double best = kInfinity;
    for (std::size_t y : graph.component_members(graph.component_of(x))) {
      if (mass[y] < best) {
        best = mass[y];
        out.certificate[x] = y;
      }
    }
    if (!(best < bound)) {
      out.certificate[x] = kUnreachable;
      out.passes = false;
      if (!out.failing) out.failing = x;
    }
  }
  return out;
}

/// Sum of tents: heights[k] * (1 - d(x, centers[k]) / radii[k]) on the open
/// ball B_radii[k](centers[k]), zero outside every ball. The balls must be
/// pairwise disjoint.
inline ScalarFunction spike_function(const MetricSpace& space, std::span<const std::size_t> centers,
                                     std::span<const double> radii, std::span<const double> heights) {
  if (centers.size() != radii.size() || centers.size() != heights.size())
    throw Error(Errc::bad_param, "centers, radii and heights must have equal length");
  for (std::size_t c : centers) space.check_index(c);
  for (double r : radii)
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(Errc::bad_param, "spike radii must be finite and > 0");
  std::vector<double> values(space.size(), 0.0);
  std::vector<std::size_t> owner(space.size(), kUnreachable);
  for (std::size_t k = 0; k < centers.size(); ++k) {
    for (std::size_t x = 0; x < space.size(); ++x) {
      const double d = space.raw_distance(x, centers[k]);
      if (!(d < radii[k])) continue;
      if (owner[x] != kUnreachable) throw OverlappingBalls(owner[x], k, x);
      owner[x] = k;
      values[x] = heights[k] * (1.0 - d / radii[k]);
    }
  }
  return {space, std::move(values)};
}

}  // namespace chainscope
