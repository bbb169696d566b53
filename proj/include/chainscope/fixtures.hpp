#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chainscope/approximation.hpp"
#include "chainscope/chain_graph.hpp"
#include "chainscope/error.hpp"
#include "chainscope/metric_space.hpp"
#include "chainscope/moduli.hpp"
#include "chainscope/sequences.hpp"
#include "chainscope/sparse_vector.hpp"

namespace chainscope {

enum class FixtureName {
  bounded_line,
  segment_chain,
  tent_family,
  harmonic_sums,
  sqrt_space,
  naturals_plus,
  scaled_unit_vectors,
  grid_interval,
  slow_spike_grid,
};

inline const std::vector<std::pair<FixtureName, std::string>>& fixture_names() {
  static const std::vector<std::pair<FixtureName, std::string>> names{
      {FixtureName::bounded_line, "bounded-line"},
      {FixtureName::segment_chain, "segment-chain"},
      {FixtureName::tent_family, "tent-family"},
      {FixtureName::harmonic_sums, "harmonic-sums"},
      {FixtureName::sqrt_space, "sqrt-space"},
      {FixtureName::naturals_plus, "naturals-plus"},
      {FixtureName::scaled_unit_vectors, "scaled-unit-vectors"},
      {FixtureName::grid_interval, "grid-interval"},
      {FixtureName::slow_spike_grid, "slow-spike-grid"},
  };
  return names;
}

inline std::string fixture_name(FixtureName name) {
  for (const auto& [value, text] : fixture_names())
    if (value == name) return text;
  return "unknown";
}

inline FixtureName parse_fixture_name(const std::string& text) {
  for (const auto& [value, name] : fixture_names())
    if (name == text) return value;
  throw Error(Errc::unknown_fixture, "no fixture named '" + text + "'");
}

/// Fixture parameters. Fields a fixture does not use are ignored.
///
///   bounded-line         points i/subdiv on [0, n] under min{1, |x - y|}
///   segment-chain        segments X_1..X_n in l^inf, grid k/(subdiv (i+1))
///   tent-family          variant "pieces": f^i_k on {1/m} u {0}
///                        variant "ramp":   min(i x, 1) on a grid of `grid` points
///   harmonic-sums        partial sums H_1..H_n, f(H_i) = sqrt(i)
///   sqrt-space           {sqrt(i)}, f = indicator of even i
///   naturals-plus        {1..n} u {i + 1/i : 2 <= i <= n}, f = indicator of the integers
///   scaled-unit-vectors  variant "rays":         r e_i, r on a grid of step `grid`
///                        variant "shifted":      i e_1 + (1/i) e_k, f = i^k
///                        variant "sqrt-shifted": sqrt(i) e_1 + (1/i) e_k, f = i^k
///   grid-interval        n + 1 equally spaced points on [lo, hi]
///   slow-spike-grid      grid-interval on [0, 1] carrying narrow spikes of `height`
struct FixtureSpec {
  FixtureName name = FixtureName::grid_interval;
  std::size_t n = 10;
  std::size_t subdiv = 1;
  std::string variant;
  double grid = 0.0;  // 0 selects the fixture default
  double lo = 0.0;
  double hi = 1.0;
  double height = 1.0;
};

/// A generated example space with its canonical enumeration, function and
/// (for function families) the common domain. Functions built from a fixture
/// point into it, so keep the fixture in place while they are in use.
struct Fixture {
  FixtureSpec spec;
  MetricSpace space;
  std::vector<std::size_t> prefix;
  std::optional<std::vector<double>> function;
  /// Family fixtures: space points are functions on this domain.
  std::optional<MetricSpace> domain;
  std::vector<std::vector<double>> family;
  /// Named points such as "e8".
  std::map<std::string, std::size_t> labels;
  /// Point groups such as the segments X_i, in order.
  std::vector<std::vector<std::size_t>> segments;

  std::size_t label(const std::string& name) const {
    const auto it = labels.find(name);
    if (it == labels.end()) throw Error(Errc::bad_param, "fixture has no point labelled '" + name + "'");
    return it->second;
  }

  SequencePrefix canonical_prefix() const {
    if (prefix.empty()) throw Error(Errc::bad_param, fixture_name(spec.name) + " has no canonical prefix");
    return {space, prefix};
  }

  ScalarFunction canonical_function() const {
    if (!function) throw Error(Errc::bad_param, fixture_name(spec.name) + " has no canonical function");
    return {space, *function};
  }

  std::vector<ScalarFunction> family_functions() const {
    if (!domain) throw Error(Errc::bad_param, fixture_name(spec.name) + " is not a function family");
    std::vector<ScalarFunction> out;
    for (const auto& values : family) out.emplace_back(*domain, values);
    return out;
  }
};

namespace detail {

inline std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

inline void require_param(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::bad_param, what);
}

inline Fixture make_fixture(const FixtureSpec& spec, ProviderData data) {
  return Fixture{spec, build_space(std::move(data)), {}, std::nullopt, std::nullopt, {}, {}, {}};
}

inline Fixture bounded_line(const FixtureSpec& spec) {
  BoundedUsual data{1.0, {}};
  const std::size_t count = spec.n * spec.subdiv + 1;
  for (std::size_t i = 0; i < count; ++i)
    data.x.push_back(static_cast<double>(i) / static_cast<double>(spec.subdiv));
  Fixture fx = make_fixture(spec, std::move(data));
  fx.prefix = iota_indices(count);
  return fx;
}

/// Segments traversed one after another, each from the endpoint it shares
/// with the previous one; shared endpoints appear once.
inline Fixture segment_chain(const FixtureSpec& spec) {
  SupNormSparse data;
  std::vector<std::vector<std::size_t>> segments;
  std::map<std::string, std::size_t> labels;
  for (std::size_t i = 1; i <= spec.n; ++i) {
    const std::size_t m = spec.subdiv * (i + 1);
    std::vector<std::size_t> segment;
    if (i > 1) segment.push_back(data.points.size() - 1);
    for (std::size_t k = (i == 1 ? 0 : 1); k <= m; ++k) {
      SparseVector v;
      v.add(i, static_cast<double>(m - k) / static_cast<double>(m));
      v.add(i + 1, static_cast<double>(k) / static_cast<double>(m));
      if (k == 0) labels["e" + std::to_string(i)] = data.points.size();
      if (k == m) labels["e" + std::to_string(i + 1)] = data.points.size();
      segment.push_back(data.points.size());
      data.points.push_back(std::move(v));
    }
    segments.push_back(std::move(segment));
  }
  const std::size_t count = data.points.size();
  Fixture fx = make_fixture(spec, std::move(data));
  fx.prefix = iota_indices(count);
  fx.labels = std::move(labels);
  fx.segments = std::move(segments);
  return fx;
}

inline Fixture tent_pieces(const FixtureSpec& spec) {
  const std::size_t N = spec.n;
  // Domain {1/m : 1 <= m <= N + 1} u {0}, ascending; slot(m) locates 1/m.
  std::vector<double> xs{0.0};
  for (std::size_t m = N + 1; m >= 1; --m) xs.push_back(1.0 / static_cast<double>(m));
  auto slot = [&](std::size_t m) { return N + 2 - m; };
  const std::size_t D = xs.size();

  FunctionSup data{D, {}};
  std::vector<std::vector<double>> family;
  std::vector<std::vector<std::size_t>> segments;
  for (std::size_t n = 1; n <= N; ++n) {
    std::vector<std::size_t> segment;
    if (n > 1) segment.push_back(family.size() - 1);
    for (std::size_t k = (n == 1 ? 0 : 1); k <= n + 1; ++k) {
      std::vector<double> row(D, 0.0);
      row[slot(n)] = static_cast<double>(n + 1 - k) / static_cast<double>(n + 1);
      row[slot(n + 1)] = static_cast<double>(k) / static_cast<double>(n + 1);
      segment.push_back(family.size());
      data.values.insert(data.values.end(), row.begin(), row.end());
      family.push_back(std::move(row));
    }
    segments.push_back(std::move(segment));
  }
  Fixture fx = make_fixture(spec, std::move(data));
  fx.prefix = iota_indices(family.size());
  fx.domain = line_space(std::move(xs));
  fx.family = std::move(family);
  fx.segments = std::move(segments);
  return fx;
}

/// Ramps min(i x, 1) on a uniform grid of [0, 1] enlarged by the kinks 1/m,
/// m <= n + 1, so sup distances between neighbouring ramps are attained.
inline Fixture tent_ramps(const FixtureSpec& spec) {
  const std::size_t N = spec.n;
  const auto G = static_cast<std::size_t>(spec.grid > 0.0 ? spec.grid : 300.0);
  require_param(G >= 2, "ramp grid needs at least 2 points");
  std::vector<double> xs;
  for (std::size_t i = 0; i < G; ++i) xs.push_back(static_cast<double>(i) / static_cast<double>(G - 1));
  for (std::size_t m = 1; m <= N + 1; ++m) xs.push_back(1.0 / static_cast<double>(m));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  FunctionSup data{xs.size(), {}};
  std::vector<std::vector<double>> family;
  for (std::size_t n = 1; n <= N; ++n) {
    std::vector<double> row;
    const double kink = 1.0 / static_cast<double>(n);
    for (double x : xs) row.push_back(x >= kink ? 1.0 : static_cast<double>(n) * x);
    data.values.insert(data.values.end(), row.begin(), row.end());
    family.push_back(std::move(row));
  }
  Fixture fx = make_fixture(spec, std::move(data));
  fx.prefix = iota_indices(N);
  fx.domain = line_space(std::move(xs));
  fx.family = std::move(family);
  return fx;
}

inline Fixture line_fixture(const FixtureSpec& spec, std::vector<double> xs, std::vector<double> f) {
  const std::size_t count = xs.size();
  Fixture fx = make_fixture(spec, Euclidean{1, std::move(xs)});
  fx.prefix = iota_indices(count);
  if (!f.empty()) fx.function = std::move(f);
  return fx;
}

inline Fixture harmonic_sums(const FixtureSpec& spec) {
  std::vector<double> xs, f;
  double sum = 0.0;
  for (std::size_t i = 1; i <= spec.n; ++i) {
    sum += 1.0 / static_cast<double>(i);
    xs.push_back(sum);
    f.push_back(std::sqrt(static_cast<double>(i)));
  }
  return line_fixture(spec, std::move(xs), std::move(f));
}

inline Fixture sqrt_space(const FixtureSpec& spec) {
  std::vector<double> xs, f;
  for (std::size_t i = 1; i <= spec.n; ++i) {
    xs.push_back(std::sqrt(static_cast<double>(i)));
    f.push_back(i % 2 == 0 ? 1.0 : 0.0);
  }
  return line_fixture(spec, std::move(xs), std::move(f));
}

/// Ascending order. i = 1 has no partner since 1 + 1/1 is already an integer.
inline Fixture naturals_plus(const FixtureSpec& spec) {
  struct Item {
    double x;
    double f;
    std::string label;
  };
  std::vector<Item> items;
  for (std::size_t i = 1; i <= spec.n; ++i) {
    items.push_back({static_cast<double>(i), 1.0, "n" + std::to_string(i)});
    if (i >= 2) items.push_back({static_cast<double>(i) + 1.0 / static_cast<double>(i), 0.0, "n" + std::to_string(i) + "+"});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.x < b.x; });
  std::vector<double> xs, f;
  std::map<std::string, std::size_t> labels;
  for (const Item& it : items) {
    labels[it.label] = xs.size();
    xs.push_back(it.x);
    f.push_back(it.f);
  }
  Fixture fx = line_fixture(spec, std::move(xs), std::move(f));
  fx.labels = std::move(labels);
  return fx;
}

inline Fixture scaled_unit_vectors(const FixtureSpec& spec) {
  const std::string variant = spec.variant.empty() ? "rays" : spec.variant;
  SupNormSparse data;
  std::map<std::string, std::size_t> labels;
  std::vector<double> f;
  std::vector<std::size_t> prefix;
  if (variant == "rays") {
    const double step = spec.grid > 0.0 ? spec.grid : 0.05;
    require_param(step <= 1.0, "ray grid step must lie in (0, 1]");
    const auto R = static_cast<std::size_t>(std::llround(1.0 / step));
    data.points.emplace_back();  // the shared origin
    for (std::size_t i = 1; i <= spec.n; ++i) {
      for (std::size_t j = 1; j <= R; ++j) {
        const double r = j == R ? 1.0 : static_cast<double>(j) / static_cast<double>(R);
        if (j == R) {
          labels["e" + std::to_string(i)] = data.points.size();
          prefix.push_back(data.points.size());
        }
        data.points.push_back(SparseVector::unit(i, r));
      }
    }
  } else if (variant == "shifted" || variant == "sqrt-shifted") {
    const bool root = variant == "sqrt-shifted";
    require_param(spec.n <= 64, "power fixtures are limited to n <= 64");
    for (std::size_t i = 1; i <= spec.n; ++i) {
      for (std::size_t k = 1; k <= spec.n; ++k) {
        SparseVector v;
        v.add(1, root ? std::sqrt(static_cast<double>(i)) : static_cast<double>(i));
        v.add(k, 1.0 / static_cast<double>(i));
        labels["p" + std::to_string(i) + "_" + std::to_string(k)] = data.points.size();
        prefix.push_back(data.points.size());
        data.points.push_back(std::move(v));
        f.push_back(std::pow(static_cast<double>(i), static_cast<double>(k)));
      }
    }
  } else {
    throw Error(Errc::bad_param, "unknown scaled-unit-vectors variant '" + variant + "'");
  }
  Fixture fx = make_fixture(spec, std::move(data));
  fx.prefix = std::move(prefix);
  fx.labels = std::move(labels);
  if (!f.empty()) fx.function = std::move(f);
  return fx;
}

inline std::vector<double> grid_points(std::size_t n, double lo, double hi) {
  std::vector<double> xs;
  for (std::size_t i = 0; i <= n; ++i)
    xs.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
  return xs;
}

/// Spikes of radius 1.5 grid steps centred every 10th grid point from the 5th.
inline Fixture slow_spike_grid(const FixtureSpec& spec) {
  Fixture fx = line_fixture(spec, grid_points(spec.n, 0.0, 1.0), {});
  std::vector<std::size_t> centers;
  for (std::size_t i = 5; i <= spec.n; i += 10) centers.push_back(i);
  const std::vector<double> radii(centers.size(), 1.5 / static_cast<double>(spec.n));
  const std::vector<double> heights(centers.size(), spec.height);
  const ScalarFunction spikes = spike_function(fx.space, centers, radii, heights);
  fx.function = std::vector<double>(spikes.values().begin(), spikes.values().end());
  return fx;
}

}  // namespace detail

/// Deterministic: equal specs give bit-identical spaces.
inline Fixture generate(const FixtureSpec& spec) {
  detail::require_param(spec.n >= 1, "fixture size n must be >= 1");
  detail::require_param(spec.subdiv >= 1, "subdiv must be >= 1");
  switch (spec.name) {
    case FixtureName::bounded_line: return detail::bounded_line(spec);
    case FixtureName::segment_chain: return detail::segment_chain(spec);
    case FixtureName::tent_family: {
      if (spec.variant.empty() || spec.variant == "pieces") return detail::tent_pieces(spec);
      if (spec.variant == "ramp") return detail::tent_ramps(spec);
      throw Error(Errc::bad_param, "unknown tent-family variant '" + spec.variant + "'");
    }
    case FixtureName::harmonic_sums: return detail::harmonic_sums(spec);
    case FixtureName::sqrt_space: return detail::sqrt_space(spec);
    case FixtureName::naturals_plus: return detail::naturals_plus(spec);
    case FixtureName::scaled_unit_vectors: return detail::scaled_unit_vectors(spec);
    case FixtureName::grid_interval:
      detail::require_param(spec.hi > spec.lo, "grid-interval needs lo < hi");
      return detail::line_fixture(spec, detail::grid_points(spec.n, spec.lo, spec.hi), {});
    case FixtureName::slow_spike_grid:
      detail::require_param(spec.n >= 10, "slow-spike-grid needs n >= 10");
      return detail::slow_spike_grid(spec);
  }
  throw Error(Errc::unknown_fixture, "unhandled fixture");
}

/// Minimum distance between two point groups.
inline double set_distance(const MetricSpace& space, std::span<const std::size_t> a,
                           std::span<const std::size_t> b) {
  double best = kInfinity;
  for (std::size_t i : a)
    for (std::size_t j : b) best = std::min(best, space.raw_distance(i, j));
  return best;
}

// ---- canonical claims ------------------------------------------------------

struct ClaimOutcome {
  bool passed = false;
  std::string detail;
};

/// A checkable statement about a fixture. The anchor states the
/// mathematical fact being reproduced.
struct Claim {
  std::string id;
  std::string anchor;
  std::function<ClaimOutcome(const Fixture&)> check;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

/// Minimum over group pairs |i - j| >= 2 of the group distance equals 1/2 and
/// no such pair is closer.
inline ClaimOutcome half_separation(const Fixture& fx) {
  double lowest = kInfinity;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < fx.segments.size(); ++i)
    for (std::size_t j = i + 2; j < fx.segments.size(); ++j) {
      lowest = std::min(lowest, set_distance(fx.space, fx.segments[i], fx.segments[j]));
      ++pairs;
    }
  if (pairs == 0) return {true, "fewer than 3 groups, nothing to compare"};
  const bool ok = std::abs(lowest - 0.5) <= 1e-12;
  return {ok, "min distance over " + std::to_string(pairs) + " separated pairs = " + fmt(lowest)};
}

inline ClaimOutcome consecutive_quasi_cauchy(const Fixture& fx) {
  const SequencePrefix p = fx.canonical_prefix();
  if (p.size() < 2) return {true, "prefix too short"};
  const auto schedule = ToleranceSchedule::default_for(fx.space.diameter(), p.size());
  const Verdict v = quasi_cauchy_test(p, schedule);
  return {v.consistent(), v.consistent() ? "quasi-Cauchy consistent at the default schedule"
                                         : "falsified at position " + std::to_string(v.witness->index)};
}

inline std::vector<Claim> segment_claims() {
  return {
      {"distance-half", "separated segments X_i, X_j (|i - j| >= 2) are at sup distance 1/2",
       half_separation},
      {"chain-length-bound", "a 1/4-chain from e_2n to e_2m has length at least 2(m - n) - 1",
       [](const Fixture& fx) -> ClaimOutcome {
         const ChainGraph g(fx.space, 0.25);
         std::size_t checked = 0;
         const std::size_t top = fx.spec.n + 1;
         for (std::size_t a = 2; a <= top; a += 2)
           for (std::size_t b = a + 2; b <= top; b += 2) {
             const auto chain = find_chain(g, fx.label("e" + std::to_string(a)), fx.label("e" + std::to_string(b)));
             if (!chain) continue;
             ++checked;
             const std::size_t bound = (b - a) - 1;
             if (chain->length() < bound) {
               return {false, "e" + std::to_string(a) + " to e" + std::to_string(b) + " has length " +
                                  std::to_string(chain->length()) + " < " + std::to_string(bound)};
             }
           }
         return {true, std::to_string(checked) + " chained pairs meet the bound"};
       }},
      {"arrangement-quasi-cauchy", "the segment-by-segment arrangement is a quasi-Cauchy enumeration",
       [](const Fixture& fx) -> ClaimOutcome {
         // Consecutive gaps equal the spacing of the segment being walked.
         std::size_t pos = 0;
         for (std::size_t i = 1; i <= fx.segments.size(); ++i) {
           const double spacing = 1.0 / static_cast<double>(fx.spec.subdiv * (i + 1));
           const auto& seg = fx.segments[i - 1];
           for (std::size_t s = 0; s + 1 < seg.size(); ++s, ++pos) {
             const double gap = fx.space.raw_distance(fx.prefix[pos], fx.prefix[pos + 1]);
             if (std::abs(gap - spacing) > 1e-12)
               return {false, "gap at position " + std::to_string(pos) + " is " + fmt(gap)};
           }
         }
         return consecutive_quasi_cauchy(fx);
       }},
  };
}

inline std::vector<Claim> tent_claims(const FixtureSpec& spec) {
  if (spec.variant == "ramp") {
    std::vector<Claim> claims{
        {"oscillation-1-at-0", "each ramp satisfies |f_n(1/n) - f_n(0)| = 1 > 1/2",
         [](const Fixture& fx) -> ClaimOutcome {
           const auto& xs = std::get<Euclidean>(fx.domain->data()).coords;
           for (std::size_t n = 1; n <= fx.family.size(); ++n) {
             const auto at = std::find(xs.begin(), xs.end(), 1.0 / static_cast<double>(n));
             const double osc = std::abs(fx.family[n - 1][static_cast<std::size_t>(at - xs.begin())] -
                                         fx.family[n - 1][0]);
             if (osc != 1.0) return {false, "f_" + std::to_string(n) + " oscillation " + fmt(osc)};
           }
           return {true, "all ramps reach oscillation 1 at 0"};
         }},
        {"consecutive-gap", "neighbouring ramps are at sup distance 1/(n+1), so (f_n) is quasi-Cauchy",
         [](const Fixture& fx) -> ClaimOutcome {
           for (std::size_t n = 1; n < fx.family.size(); ++n) {
             const double gap = fx.space.raw_distance(n - 1, n);
             if (std::abs(gap - 1.0 / static_cast<double>(n + 1)) > 1e-12)
               return {false, "d(f_" + std::to_string(n) + ", f_" + std::to_string(n + 1) + ") = " + fmt(gap)};
           }
           return consecutive_quasi_cauchy(fx);
         }},
    };
    if (spec.n >= 26) {
      claims.push_back(
          {"equi-chain-not-equi", "the ramps are equi-chain continuous but not equi-continuous at 0",
           [](const Fixture& fx) -> ClaimOutcome {
             const auto family = fx.family_functions();
             const double floor = 1.05 / static_cast<double>(fx.family.size());
             const EquiReport chain = equi_chain_continuity_check(family, 0.2, floor);
             const EquiReport plain = equicontinuity_check(family, 0.5, floor, std::size_t{0});
             const bool ok = chain.passes && !plain.passes && plain.witness && plain.witness->deviation == 1.0;
             return {ok, std::string("chain check ") + (chain.passes ? "passes" : "fails") +
                             ", plain check at 0 " + (plain.passes ? "passes" : "fails")};
           }});
    }
    return claims;
  }
  return {
      {"consecutive-quasi-cauchy", "the piecewise family enumerated in order is quasi-Cauchy",
       consecutive_quasi_cauchy},
      {"inter-family-half", "separated blocks A_i, A_j (|i - j| >= 2) are at sup distance 1/2",
       half_separation},
  };
}

inline std::vector<Claim> harmonic_claims() {
  return {
      {"gaps-reciprocal", "consecutive partial sums differ by 1/(n+1)",
       [](const Fixture& fx) -> ClaimOutcome {
         for (std::size_t k = 0; k + 1 < fx.prefix.size(); ++k) {
           const double gap = fx.space.raw_distance(k, k + 1);
           if (std::abs(gap - 1.0 / static_cast<double>(k + 2)) > 1e-12)
             return {false, "gap " + std::to_string(k) + " = " + fmt(gap)};
         }
         return {true, "all gaps match"};
       }},
      {"quasi-cauchy-not-cauchy", "the partial sums are quasi-Cauchy but not Cauchy",
       [](const Fixture& fx) -> ClaimOutcome {
         const SequencePrefix p = fx.canonical_prefix();
         const auto schedule = ToleranceSchedule::default_for(fx.space.diameter(), p.size());
         const bool qc = quasi_cauchy_test(p, schedule).consistent();
         const bool cauchy = cauchy_test(p, schedule).consistent();
         return {qc && !cauchy, std::string("qc ") + (qc ? "consistent" : "falsified") + ", cauchy " +
                                    (cauchy ? "consistent" : "falsified")};
       }},
      {"qc-lipschitz-divergence", "f(H_n) = sqrt(n) has consecutive ratio (n+1)/(sqrt(n+1)+sqrt(n))",
       [](const Fixture& fx) -> ClaimOutcome {
         const ScalarFunction f = fx.canonical_function();
         const ModulusReport r = seq_lipschitz_constant(f, fx.canonical_prefix(), SeqMode::consecutive);
         const double n = static_cast<double>(fx.prefix.size() - 1);
         const double expected = (n + 1.0) / (std::sqrt(n + 1.0) + std::sqrt(n));
         return {std::abs(r.constant - expected) <= 1e-9, "constant " + fmt(r.constant) + ", expected " + fmt(expected)};
       }},
      {"approximation-error", "the level-window approximant satisfies |eps h - f| < eps",
       [](const Fixture& fx) -> ClaimOutcome {
         const ScalarFunction f = fx.canonical_function();
         for (double eps : {0.5, 0.1}) {
           const LevelDecomposition d = approximate(f, eps);
           if (!(d.sup_error < eps)) return {false, "eps " + fmt(eps) + ": sup error " + fmt(d.sup_error)};
         }
         return {true, "sup error below eps at 0.5 and 0.1"};
       }},
  };
}

inline std::vector<Claim> sqrt_claims() {
  return {
      {"cauchy-lipschitz-not-qc-lipschitz",
       "the indicator of {sqrt(2n)} is Lipschitz on even terms but its consecutive ratios diverge",
       [](const Fixture& fx) -> ClaimOutcome {
         const ScalarFunction f = fx.canonical_function();
         std::vector<std::size_t> even;
         for (std::size_t i = 1; i < fx.prefix.size(); i += 2) even.push_back(i);
         if (even.size() < 2 || fx.prefix.size() < 4) return {true, "fixture too small"};
         const double flat = seq_lipschitz_constant(f, SequencePrefix(fx.space, even), SeqMode::all_pairs).constant;
         const std::vector<std::size_t> half(fx.prefix.begin(), fx.prefix.begin() + static_cast<std::ptrdiff_t>(fx.prefix.size() / 2));
         const double small = seq_lipschitz_constant(f, SequencePrefix(fx.space, half), SeqMode::consecutive).constant;
         const double large = seq_lipschitz_constant(f, fx.canonical_prefix(), SeqMode::consecutive).constant;
         return {flat == 0.0 && large > small,
                 "even-terms constant " + fmt(flat) + ", consecutive " + fmt(small) + " -> " + fmt(large)};
       }},
  };
}

inline std::vector<Claim> naturals_claims() {
  return {
      {"lits-unbounded", "chi_N has ratio n on the pair (n, n + 1/n), so it is not Lipschitz in the small",
       [](const Fixture& fx) -> ClaimOutcome {
         const ScalarFunction f = fx.canonical_function();
         const ModulusReport r = lits_modulus(f, 0.25);
         const double n = static_cast<double>(fx.spec.n);
         return {fx.spec.n < 2 || std::abs(r.constant - n) <= 1e-9 * n,
                 "lits modulus at 0.25 = " + fmt(r.constant) + " for n = " + fmt(n)};
       }},
      {"local-constants", "at radius 1/4 the constants K_n = K_{n+1/n} = n work, sharply once 1/n < 1/4",
       [](const Fixture& fx) -> ClaimOutcome {
         const ScalarFunction f = fx.canonical_function();
         const LocalLipschitzProfile prof = local_lipschitz_profile(f, 0.25);
         for (std::size_t i = 2; i <= fx.spec.n; ++i) {
           const double n = static_cast<double>(i);
           for (const std::string& name : {"n" + std::to_string(i), "n" + std::to_string(i) + "+"}) {
             const double k = prof.constants[fx.label(name)];
             const bool sharp = i > 4;
             if (k > n * (1 + 1e-9) || (sharp && std::abs(k - n) > 1e-9 * n))
               return {false, "K at " + name + " = " + fmt(k)};
           }
         }
         return {!prof.has_infinite(), "all local constants match"};
       }},
  };
}

inline std::vector<Claim> unit_vector_claims(const FixtureSpec& spec) {
  const std::string variant = spec.variant.empty() ? "rays" : spec.variant;
  if (variant == "rays") {
    return {
        {"unit-vectors-bqc", "(e_n) is Bourbaki quasi-Cauchy in the union of rays",
         [](const Fixture& fx) -> ClaimOutcome {
           const double step = fx.spec.grid > 0.0 ? fx.spec.grid : 0.05;
           const double eps = step * 1.4;
           const BourbakiQcResult r = bourbaki_qc_test(fx.canonical_prefix(), eps);
           return {r.consistent && r.n0 == 0, "eps " + fmt(eps) + ": n0 = " + std::to_string(r.n0)};
         }},
    };
  }
  return {
      {"local-unbounded", "i^k is unbounded on the small sets {i e_1 + (1/i) e_k : k}",
       [](const Fixture& fx) -> ClaimOutcome {
         const ScalarFunction f = fx.canonical_function();
         const LocalLipschitzProfile prof = local_lipschitz_profile(f, 0.5);
         FixtureSpec smaller = fx.spec;
         smaller.n = std::max<std::size_t>(1, fx.spec.n / 2);
         const Fixture half = generate(smaller);
         const double before = local_lipschitz_profile(half.canonical_function(), 0.5).max();
         return {prof.max() > before, "max local constant " + fmt(before) + " -> " + fmt(prof.max())};
       }},
  };
}

inline std::vector<Claim> bounded_line_claims() {
  return {
      {"bounded-not-bourbaki-bounded",
       "under min{1, |x - y|} the line is bounded and chainable but needs ever longer chains",
       [](const Fixture& fx) -> ClaimOutcome {
         if (fx.spec.subdiv < 2) return {true, "needs subdiv >= 2 to resolve chains below the cap"};
         const double diam = fx.space.diameter();
         const double eps = 1.5 / static_cast<double>(fx.spec.subdiv);
         const CoveringProfile prof = covering_profile(fx.space, eps);
         const std::size_t need = fx.spec.n * fx.spec.subdiv / 2;
         return {diam <= 1.0 && prof.components == 1 && prof.m_star >= need,
                 "diameter " + fmt(diam) + ", m_star " + std::to_string(prof.m_star)};
       }},
  };
}

}  // namespace detail

/// Claims tied to a fixture; empty when the fixture carries none.
inline std::vector<Claim> canonical_claims(const FixtureSpec& spec) {
  switch (spec.name) {
    case FixtureName::segment_chain: return detail::segment_claims();
    case FixtureName::tent_family: return detail::tent_claims(spec);
    case FixtureName::harmonic_sums: return detail::harmonic_claims();
    case FixtureName::sqrt_space: return detail::sqrt_claims();
    case FixtureName::naturals_plus: return detail::naturals_claims();
    case FixtureName::scaled_unit_vectors: return detail::unit_vector_claims(spec);
    case FixtureName::bounded_line: return detail::bounded_line_claims();
    case FixtureName::grid_interval:
    case FixtureName::slow_spike_grid: return {};
  }
  throw Error(Errc::unknown_fixture, "unhandled fixture");
}

/// Fixture settings exercised by a full verification run.
inline std::vector<FixtureSpec> verification_specs() {
  using F = FixtureName;
  auto spec = [](F name, std::size_t n, std::size_t subdiv = 1, std::string variant = {}) {
    FixtureSpec s;
    s.name = name;
    s.n = n;
    s.subdiv = subdiv;
    s.variant = std::move(variant);
    return s;
  };
  return {
      spec(F::bounded_line, 10, 2),
      spec(F::segment_chain, 12, 2),
      spec(F::segment_chain, 16, 4),
      spec(F::tent_family, 10),
      spec(F::tent_family, 30, 1, "ramp"),
      spec(F::harmonic_sums, 500),
      spec(F::sqrt_space, 50),
      spec(F::naturals_plus, 50),
      spec(F::scaled_unit_vectors, 10, 1, "rays"),
      spec(F::scaled_unit_vectors, 12, 1, "shifted"),
      spec(F::scaled_unit_vectors, 12, 1, "sqrt-shifted"),
      spec(F::grid_interval, 100),
  };
}

}  // namespace chainscope
