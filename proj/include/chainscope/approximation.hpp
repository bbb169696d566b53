#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chainscope/error.hpp"
#include "chainscope/metric_space.hpp"
#include "chainscope/moduli.hpp"
#include "chainscope/sequences.hpp"

namespace chainscope {

/// Level windows C_n = {x : (n-1) eps < f(x) < (n+1) eps}, nonempty ones only.
using Levels = std::map<std::int64_t, std::vector<std::size_t>>;

inline Levels level_sets(const ScalarFunction& f, double eps) {
  detail::require_positive_eps(eps);
  Levels out;
  for (std::size_t x = 0; x < f.size(); ++x) {
    const double v = f[x];
    const auto q = static_cast<std::int64_t>(std::floor(v / eps));
    for (std::int64_t n = q - 1; n <= q + 2; ++n) {
      if (static_cast<double>(n - 1) * eps < v && v < static_cast<double>(n + 1) * eps) out[n].push_back(x);
    }
  }
  return out;
}

struct LevelPartition {
  /// g_n(x) = min{1, d(x, X \ C_n)}, zero off C_n.
  std::map<std::int64_t, std::vector<double>> parts;
  /// g = sum of the parts.
  std::vector<double> g;
};

inline LevelPartition partition_functions(const MetricSpace& space, const Levels& levels) {
  const std::size_t n = space.size();
  std::vector<int> hits(n, 0);
  for (const auto& [level, members] : levels)
    for (std::size_t x : members) {
      space.check_index(x);
      ++hits[x];
    }
  for (std::size_t x = 0; x < n; ++x) {
    if (hits[x] < 1 || hits[x] > 2) {
      throw Error(Errc::inconsistent_levels,
                  "point " + std::to_string(x) + " lies in " + std::to_string(hits[x]) + " windows");
    }
  }
  LevelPartition out;
  out.g.assign(n, 0.0);
  std::vector<char> inside(n);
  for (const auto& [level, members] : levels) {
    std::fill(inside.begin(), inside.end(), 0);
    for (std::size_t x : members) inside[x] = 1;
    std::vector<double> part(n, 0.0);
    for (std::size_t x : members) {
      double to_complement = kInfinity;
      for (std::size_t y = 0; y < n; ++y)
        if (!inside[y]) to_complement = std::min(to_complement, space.raw_distance(x, y));
      part[x] = std::min(1.0, to_complement);
      out.g[x] += part[x];
    }
    out.parts.emplace(level, std::move(part));
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (!(out.g[x] > 0.0 && out.g[x] <= 2.0)) {
      throw Error(Errc::inconsistent_levels, "g(" + std::to_string(x) + ") = " + std::to_string(out.g[x]) +
                                                 " outside (0, 2]");
    }
  }
  return out;
}

/// Level-window approximant eps*h of f with h = (sum_n n g_n) / g.
struct LevelDecomposition {
  ScalarFunction f;
  double eps = 0.0;
  Levels levels;
  LevelPartition partition;
  ScalarFunction h;
  ScalarFunction approx;
  double sup_error = 0.0;

  const std::vector<double>& g() const noexcept { return partition.g; }
};

/// Runs the level-window construction and asserts sup |eps h - f| < eps.
/// A violated bound is a library bug and raises PostconditionFailed.
inline LevelDecomposition approximate(const ScalarFunction& f, double eps) {
  const MetricSpace& X = f.space();
  Levels levels = level_sets(f, eps);
  LevelPartition partition = partition_functions(X, levels);
  std::vector<double> h(X.size(), 0.0);
  for (const auto& [level, part] : partition.parts)
    for (std::size_t x = 0; x < X.size(); ++x) h[x] += static_cast<double>(level) * part[x];
  std::vector<double> approx(X.size());
  double sup_error = 0.0;
  for (std::size_t x = 0; x < X.size(); ++x) {
    h[x] /= partition.g[x];
    approx[x] = eps * h[x];
    sup_error = std::max(sup_error, std::abs(approx[x] - f[x]));
  }
  if (!(sup_error < eps)) {
    throw Error(Errc::postcondition, "sup |eps h - f| = " + std::to_string(sup_error) + " is not below eps");
  }
  return {f, eps, std::move(levels), std::move(partition), ScalarFunction(X, std::move(h)),
          ScalarFunction(X, std::move(approx)), sup_error};
}

struct BoundViolation {
  std::size_t position = 0;  // prefix pair (position, position + 1)
  std::string bound;         // "g" or "h"
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Numeric check of the two step estimates along a prefix tail:
/// |g(x_k) - g(x_k+1)| <= 3 d and |h(x_k) - h(x_k+1)| <= (10 / delta^2) d.
struct ProofBounds {
  /// Nearest distance from a prefix point x to a point y with
  /// |f(y) - f(x)| >= eps/4, capped at 1. Every open ball of this radius
  /// around a prefix point keeps f within eps/4 of its centre.
  double delta = 0.0;
  /// delta does not exceed the largest step past the last schedule stage,
  /// so the prefix never settles into steps shorter than delta.
  bool no_valid_delta = false;
  double max_tail_gap = 0.0;
  /// Largest step at positions >= the last stage start.
  double max_final_gap = 0.0;
  std::size_t tail_start = 0;
  std::size_t checked = 0;
  /// Smallest rhs - lhs over checked pairs; +infinity when every |change| is 0.
  double g_margin = kInfinity;
  double h_margin = kInfinity;
  /// Sharpest constants seen: max |change| / d.
  double g_constant = 0.0;
  double h_constant = 0.0;
  std::vector<BoundViolation> violations;

  bool holds() const noexcept { return violations.empty(); }
};

inline ProofBounds proof_bounds_report(const LevelDecomposition& decomp, const SequencePrefix& prefix,
                                       const ToleranceSchedule& schedule) {
  const MetricSpace& X = decomp.f.space();
  if (&prefix.space() != &X) throw Error(Errc::bad_param, "prefix and decomposition live on different spaces");
  const Verdict qc = quasi_cauchy_test(prefix, schedule);
  if (!qc.consistent()) {
    throw Error(Errc::precondition, "prefix is not quasi-Cauchy at the schedule (stage " +
                                        std::to_string(qc.witness->stage) + ", position " +
                                        std::to_string(qc.witness->index) + ")");
  }
  const ScalarFunction& f = decomp.f;
  const std::vector<double>& g = decomp.g();
  const ScalarFunction& h = decomp.h;
  const double quarter = decomp.eps / 4.0;

  ProofBounds out;
  out.delta = 1.0;
  for (std::size_t x : prefix.indices())
    for (std::size_t y = 0; y < X.size(); ++y)
      if (std::abs(f[y] - f[x]) >= quarter) out.delta = std::min(out.delta, X.raw_distance(x, y));

  out.tail_start = schedule[0].start;
  const double h_factor = 10.0 / (out.delta * out.delta);
  for (std::size_t k = out.tail_start; k + 1 < prefix.size(); ++k) {
    const std::size_t a = prefix[k], b = prefix[k + 1];
    const double d = X.raw_distance(a, b);
    out.max_tail_gap = std::max(out.max_tail_gap, d);
    if (k >= schedule[schedule.size() - 1].start) out.max_final_gap = std::max(out.max_final_gap, d);
    const double dg = std::abs(g[a] - g[b]);
    const double dh = std::abs(h[a] - h[b]);
    ++out.checked;
    if (dg > 0.0) {
      out.g_margin = std::min(out.g_margin, 3.0 * d - dg);
      out.g_constant = std::max(out.g_constant, detail::difference_quotient(dg, d));
    }
    if (dh > 0.0) {
      out.h_margin = std::min(out.h_margin, h_factor * d - dh);
      out.h_constant = std::max(out.h_constant, detail::difference_quotient(dh, d));
    }
    if (dg > 3.0 * d) out.violations.push_back({k, "g", dg, 3.0 * d});
    if (dh > h_factor * d) out.violations.push_back({k, "h", dh, h_factor * d});
  }
  out.no_valid_delta = !(out.delta > out.max_final_gap);
  return out;
}

}  // namespace chainscope
