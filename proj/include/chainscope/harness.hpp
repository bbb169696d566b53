#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "chainscope/chain_graph.hpp"
#include "chainscope/disjoint_sets.hpp"
#include "chainscope/error.hpp"
#include "chainscope/metric_space.hpp"
#include "chainscope/moduli.hpp"
#include "chainscope/sequences.hpp"

namespace chainscope {

enum class Generator { euclidean_cloud, repaired_matrix };

struct RandomSpaceSpec {
  std::size_t n = 10;
  Generator generator = Generator::euclidean_cloud;
  std::size_t dim = 2;       // euclidean-cloud
  double scale = 1.0;        // euclidean-cloud box side
  double density = 0.3;      // repaired-matrix: chance of a short edge
  double duplicates = 0.0;   // euclidean-cloud: chance a point copies an earlier one
  std::uint64_t seed = 0;
};

/// Seeded random metric space. Equal specs give identical spaces.
///
/// euclidean-cloud: uniform points in [0, scale]^dim.
/// repaired-matrix: edge weights U(0,1) with probability density, otherwise
/// 1 + n U(0,1), closed under shortest paths.
inline MetricSpace random_space(const RandomSpaceSpec& spec) {
  if (spec.n < 2) throw Error(Errc::bad_spec, "random spaces need n >= 2");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (spec.generator == Generator::euclidean_cloud) {
    if (spec.dim == 0 || !(spec.scale > 0.0)) throw Error(Errc::bad_spec, "cloud needs dim >= 1 and scale > 0");
    Euclidean data{spec.dim, {}};
    for (std::size_t i = 0; i < spec.n; ++i) {
      if (i > 0 && unit(rng) < spec.duplicates) {
        const std::size_t j = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
        for (std::size_t k = 0; k < spec.dim; ++k) data.coords.push_back(data.coords[j * spec.dim + k]);
        continue;
      }
      for (std::size_t k = 0; k < spec.dim; ++k) data.coords.push_back(spec.scale * unit(rng));
    }
    return build_space(std::move(data));
  }
  if (!(spec.density >= 0.0 && spec.density <= 1.0)) throw Error(Errc::bad_spec, "density must lie in [0, 1]");
  const std::size_t n = spec.n;
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = unit(rng) < spec.density ? unit(rng) : 1.0 + static_cast<double>(n) * unit(rng);
      d[i * n + j] = d[j * n + i] = w;
    }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
  return build_space(ExplicitMatrix{std::move(d)});
}

/// Same points with every distance multiplied by factor, as an explicit matrix.
inline MetricSpace scaled_space(const MetricSpace& space, double factor) {
  const std::size_t n = space.size();
  ExplicitMatrix m{std::vector<double>(n * n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.d[i * n + j] = factor * space.raw_distance(i, j);
  return build_space(std::move(m), space.tol());
}

/// Largest edge of a minimum spanning tree: the space is eps-chainable iff
/// eps exceeds it.
inline double connectivity_threshold(const MetricSpace& space) {
  const std::size_t n = space.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(space.raw_distance(i, j), i, j);
  std::sort(edges.begin(), edges.end());
  DisjointSets sets(n);
  double top = 0.0;
  std::size_t joined = 1;
  for (const auto& [w, i, j] : edges) {
    if (joined == n) break;
    if (sets.find(i) != sets.find(j)) {
      sets.unite(i, j);
      top = w;
      ++joined;
    }
  }
  return top;
}

// ---- brute-force oracles ---------------------------------------------------

inline constexpr std::size_t kOracleMaxPoints = 64;
inline constexpr std::size_t kOracleMaxChain = 4;

/// Blocks of the transitive closure of d < eps by depth-first search, each
/// sorted, ordered by smallest member.
inline std::vector<std::vector<std::size_t>> oracle_components(const MetricSpace& space, double eps) {
  detail::require_positive_eps(eps);
  const std::size_t n = space.size();
  if (n > kOracleMaxPoints) throw Error(Errc::too_large, "component oracle is limited to 64 points");
  std::vector<char> seen(n, 0);
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> block, stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      block.push_back(u);
      for (std::size_t v = 0; v < n; ++v) {
        if (!seen[v] && space.raw_distance(u, v) < eps) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    std::sort(block.begin(), block.end());
    blocks.push_back(std::move(block));
  }
  return blocks;
}

/// Endpoints of every eps-chain of length <= m starting at x, found by
/// enumerating all point tuples.
inline std::vector<std::size_t> oracle_ball(const MetricSpace& space, double eps, std::size_t x, std::size_t m) {
  detail::require_positive_eps(eps);
  space.check_index(x);
  const std::size_t n = space.size();
  if (n > kOracleMaxPoints || m > kOracleMaxChain) {
    throw Error(Errc::too_large, "chain enumeration is limited to 64 points and length 4");
  }
  std::set<std::size_t> ends{x};
  std::vector<std::size_t> tuple;
  std::function<void(std::size_t)> extend = [&](std::size_t from) {
    if (tuple.size() == m) return;
    for (std::size_t y = 0; y < n; ++y) {
      if (!(space.raw_distance(from, y) < eps)) continue;
      tuple.push_back(y);
      ends.insert(y);
      extend(y);
      tuple.pop_back();
    }
  };
  extend(x);
  return {ends.begin(), ends.end()};
}

// ---- implication suite -----------------------------------------------------

enum class Mutation { none, comparator };

/// The broken comparator used to test the tester: d >= eps instead of d < eps.
struct FlippedBelow {
  constexpr bool operator()(double d, double eps) const noexcept { return !(d < eps); }
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t points = 0;
  std::size_t prefix_length = 0;
  std::size_t checks = 0;
  bool ok = true;
};

struct SuiteFailure {
  std::size_t trial = 0;
  std::string property;  // "a" .. "d"
  std::string detail;
  /// Size of the shrunk counterexample.
  std::size_t points = 0;
  std::vector<std::size_t> prefix;
};

struct SuiteReport {
  std::size_t trials = 0;
  std::vector<TrialRecord> records;
  std::vector<SuiteFailure> failures;

  bool clean() const noexcept { return failures.empty(); }
};

namespace detail {

/// One generated counterexample candidate: a space, a function on it, a
/// prefix and a schedule.
struct TrialCase {
  MetricSpace space;
  std::vector<double> f;
  std::vector<std::size_t> prefix;
  ToleranceSchedule schedule;
};

using Property = std::function<std::optional<std::string>(const TrialCase&, std::size_t& checks)>;

inline Verdict qc_with(const SequencePrefix& p, const ToleranceSchedule& s, Mutation mutation) {
  return mutation == Mutation::comparator ? quasi_cauchy_test(p, s, FlippedBelow{}) : quasi_cauchy_test(p, s);
}

inline Property implication_a(Mutation mutation) {
  return [mutation](const TrialCase& c, std::size_t& checks) -> std::optional<std::string> {
    const SequencePrefix p(c.space, c.prefix);
    const bool cauchy = cauchy_test(p, c.schedule).consistent();
    const bool qc = qc_with(p, c.schedule, mutation).consistent();
    const bool pseudo = pseudo_cauchy_test(p, c.schedule).consistent();
    checks += 2;
    if (cauchy && !qc) return "cauchy-consistent prefix falsified by the quasi-Cauchy test";
    if (qc && !pseudo) return "quasi-Cauchy-consistent prefix falsified by the pseudo-Cauchy test";
    return std::nullopt;
  };
}

inline Property implication_b(Mutation mutation) {
  return [mutation](const TrialCase& c, std::size_t& checks) -> std::optional<std::string> {
    const ScalarFunction f(c.space, c.f);
    const SequencePrefix p(c.space, c.prefix);
    const double delta = c.schedule[0].eps;
    const double L = lipschitz_constant(f).constant;
    const double M = lits_modulus(f, delta).constant;
    const double Q = seq_lipschitz_constant(f, p, SeqMode::consecutive).constant;
    const double C = seq_lipschitz_constant(f, p, SeqMode::all_pairs).constant;
    const bool qc = qc_with(p, c.schedule, mutation).consistent();
    const bool cauchy = cauchy_test(p, c.schedule).consistent();
    bool gaps_below = true;
    for (std::size_t k = 0; k + 1 < p.size(); ++k) gaps_below = gaps_below && p.gap(k, k + 1) < delta;
    checks += 5;
    if (std::isfinite(L) && !std::isfinite(M)) return "finite Lipschitz constant but infinite small-scale modulus";
    if (M > L) return "small-scale modulus exceeds the Lipschitz constant";
    if (std::isfinite(M) && qc && !std::isfinite(Q)) return "infinite consecutive modulus on a quasi-Cauchy prefix";
    if (gaps_below && Q > M) return "consecutive modulus exceeds the small-scale modulus";
    if (std::isfinite(M) && cauchy && !std::isfinite(C)) return "infinite range modulus on a Cauchy prefix";
    if (Q > C) return "consecutive modulus exceeds the all-pairs modulus";
    return std::nullopt;
  };
}

inline Property implication_c() {
  return [](const TrialCase& c, std::size_t& checks) -> std::optional<std::string> {
    std::vector<double> scales;
    for (const Stage& s : c.schedule.stages()) scales.push_back(s.eps);
    std::sort(scales.begin(), scales.end());
    for (std::size_t a = 0; a + 1 < scales.size(); ++a) {
      const ChainGraph fine(c.space, scales[a]);
      const ChainGraph coarse(c.space, scales[a + 1]);
      ++checks;
      if (coarse.component_count() > fine.component_count()) return "component count grew with eps";
      for (std::size_t i = 0; i < c.space.size(); ++i)
        for (std::size_t j : fine.component_members(fine.component_of(i)))
          if (coarse.component_of(i) != coarse.component_of(j)) return "a fine component split at a larger eps";
    }
    return std::nullopt;
  };
}

/// Splice round trip on a schedule every stage of which chains the space.
inline Property implication_d(Mutation mutation) {
  return [mutation](const TrialCase& c, std::size_t& checks) -> std::optional<std::string> {
    const double bottleneck = connectivity_threshold(c.space);
    std::vector<Stage> stages;
    for (std::size_t j = 0; j < c.schedule.size(); ++j)
      stages.push_back({(bottleneck + 1e-9) * (1.0 + std::ldexp(1.0, -static_cast<int>(j))) + 1e-9,
                        c.schedule[j].start});
    const ToleranceSchedule schedule(std::move(stages));
    const SequencePrefix p(c.space, c.prefix);
    const SpliceResult r = splice_to_quasi_cauchy(p, schedule);
    checks += 2;
    if (!qc_with(r.spliced, r.derived, mutation).consistent()) return "spliced prefix fails the derived schedule";
    for (std::size_t k = 0; k < p.size(); ++k) {
      if ((k > 0 && r.embedding[k] <= r.embedding[k - 1]) || r.spliced[r.embedding[k]] != p[k])
        return "embedding does not preserve the input order";
    }
    return std::nullopt;
  };
}

inline std::optional<TrialCase> without_point(const TrialCase& c, std::size_t point) {
  if (c.space.size() <= 2) return std::nullopt;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < c.space.size(); ++i)
    if (i != point) keep.push_back(i);
  std::vector<std::size_t> prefix;
  for (std::size_t i : c.prefix)
    if (i != point) prefix.push_back(i > point ? i - 1 : i);
  if (prefix.size() < 2) return std::nullopt;
  std::vector<double> f;
  for (std::size_t i : keep) f.push_back(c.f[i]);
  return TrialCase{c.space.subspace(keep), std::move(f), std::move(prefix), c.schedule};
}

inline std::optional<TrialCase> without_position(const TrialCase& c, std::size_t position) {
  if (c.prefix.size() <= 2) return std::nullopt;
  TrialCase out = c;
  out.prefix.erase(out.prefix.begin() + static_cast<std::ptrdiff_t>(position));
  return out;
}

inline bool still_fails(const Property& prop, const TrialCase& c) {
  std::size_t scratch = 0;
  try {
    return prop(c, scratch).has_value();
  } catch (const Error&) {
    return false;
  }
}

/// Greedy shrink: drop points, then prefix entries, while the property
/// still fails. Deterministic for a given case.
inline TrialCase shrink(const Property& prop, TrialCase c) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t p = 0; p < c.space.size() && !changed; ++p) {
      if (auto next = without_point(c, p); next && still_fails(prop, *next)) {
        c = std::move(*next);
        changed = true;
      }
    }
    for (std::size_t k = 0; k < c.prefix.size() && !changed; ++k) {
      if (auto next = without_position(c, k); next && still_fails(prop, *next)) {
        c = std::move(*next);
        changed = true;
      }
    }
  }
  return c;
}

inline TrialCase random_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };

  RandomSpaceSpec spec;
  spec.n = pick(4, 24);
  spec.seed = rng();
  spec.generator = pick(0, 1) == 0 ? Generator::euclidean_cloud : Generator::repaired_matrix;
  spec.dim = pick(1, 3);
  spec.density = 0.2 + 0.6 * unit(rng);
  spec.duplicates = pick(0, 2) == 0 ? 0.2 : 0.0;
  MetricSpace space = random_space(spec);
  const std::size_t n = space.size();

  // Function: Lipschitz (distance to an anchor), or arbitrary values.
  std::vector<double> f(n);
  const std::size_t anchor = pick(0, n - 1);
  const bool smooth = pick(0, 1) == 0;
  const double slope = 0.5 + 3.0 * unit(rng);
  for (std::size_t i = 0; i < n; ++i) f[i] = smooth ? slope * space.raw_distance(i, anchor) : unit(rng) * 4.0 - 2.0;

  // Prefix: a walk among near neighbours, sometimes settling on a point.
  const std::size_t len = pick(4, 30);
  std::vector<std::size_t> prefix{pick(0, n - 1)};
  const std::size_t settle = pick(0, 2) == 0 ? pick(1, len - 1) : len;
  while (prefix.size() < len) {
    const std::size_t at = prefix.back();
    if (prefix.size() >= settle) {
      prefix.push_back(at);
      continue;
    }
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t y = 0; y < n; ++y) order.emplace_back(space.raw_distance(at, y), y);
    std::sort(order.begin(), order.end());
    const std::size_t reach = std::min<std::size_t>(n - 1, 3);
    prefix.push_back(order[pick(0, reach)].second);
  }

  const std::size_t stages = pick(1, 4);
  ToleranceSchedule schedule = ToleranceSchedule::default_for(space.diameter(), len, stages);
  return {std::move(space), std::move(f), std::move(prefix), std::move(schedule)};
}

}  // namespace detail

/// Randomized check of the finite-scale implications:
///   (a) Cauchy => quasi-Cauchy => pseudo-Cauchy at one schedule;
///   (b) Lipschitz => small-scale Lipschitz => finite consecutive modulus on
///       quasi-Cauchy prefixes => finite range modulus on Cauchy prefixes;
///   (c) chain components only merge as eps grows;
///   (d) splicing yields a quasi-Cauchy prefix embedding the input.
/// Every violation is shrunk and reported; on a correct build there are none.
inline SuiteReport implication_suite(std::size_t trials, std::uint64_t seed, Mutation mutation = Mutation::none) {
  if (trials < 1) throw Error(Errc::bad_param, "implication suite needs at least one trial");
  const std::vector<std::pair<std::string, detail::Property>> properties{
      {"a", detail::implication_a(mutation)},
      {"b", detail::implication_b(mutation)},
      {"c", detail::implication_c()},
      {"d", detail::implication_d(mutation)},
  };
  SuiteReport report;
  report.trials = trials;
  std::seed_seq base{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::vector<std::uint32_t> words(2 * trials);
  base.generate(words.begin(), words.end());
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = (std::uint64_t{words[2 * t]} << 32) | words[2 * t + 1];
    const detail::TrialCase c = detail::random_case(trial_seed);
    TrialRecord record{t, trial_seed, c.space.size(), c.prefix.size(), 0, true};
    for (const auto& [name, prop] : properties) {
      std::optional<std::string> failure;
      try {
        failure = prop(c, record.checks);
      } catch (const Error& e) {
        failure = std::string("unexpected error: ") + e.what();
      }
      if (!failure) continue;
      record.ok = false;
      const detail::TrialCase small = detail::shrink(prop, c);
      report.failures.push_back({t, name, *failure, small.space.size(), small.prefix});
    }
    report.records.push_back(record);
  }
  return report;
}

}  // namespace chainscope
