#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chainscope/chain_graph.hpp"
#include "chainscope/error.hpp"
#include "chainscope/metric_space.hpp"

namespace chainscope {

/// A finite ordered list of point indices into a space: the computational
/// stand-in for a sequence. Repeats are allowed. The space must outlive the
/// prefix.
class SequencePrefix {
 public:
  SequencePrefix(const MetricSpace& space, std::vector<std::size_t> indices)
      : space_(&space), indices_(std::move(indices)) {
    if (indices_.empty()) throw Error(Errc::short_prefix, "a prefix needs at least one point");
    for (std::size_t i : indices_) space.check_index(i);
  }

  const MetricSpace& space() const noexcept { return *space_; }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  std::size_t operator[](std::size_t position) const { return indices_.at(position); }

  /// Distance between the points at two prefix positions.
  double gap(std::size_t a, std::size_t b) const { return space_->raw_distance(indices_[a], indices_[b]); }

  /// Subsequence at the given (strictly increasing) positions.
  SequencePrefix select(std::span<const std::size_t> positions) const {
    std::vector<std::size_t> out;
    out.reserve(positions.size());
    for (std::size_t p : positions) out.push_back(indices_.at(p));
    return {*space_, std::move(out)};
  }

 private:
  const MetricSpace* space_;
  std::vector<std::size_t> indices_;
};

struct Stage {
  double eps = 0.0;
  std::size_t start = 0;

  friend bool operator==(const Stage&, const Stage&) = default;
};

/// Finite rendering of "for every eps there is n0": stage j demands its
/// condition from prefix position start_j onward. eps strictly decreases and
/// start strictly increases across stages.
class ToleranceSchedule {
 public:
  ToleranceSchedule() = default;
  explicit ToleranceSchedule(std::vector<Stage> stages) : stages_(std::move(stages)) { validate(); }

  /// eps_j = diameter * 2^-j, start_j = j * (length / (count + 1)).
  static ToleranceSchedule default_for(double diameter, std::size_t length, std::size_t count = 4) {
    if (count == 0) throw Error(Errc::bad_schedule, "a schedule needs at least one stage");
    const double top = diameter > 0.0 && std::isfinite(diameter) ? diameter : 1.0;
    const std::size_t step = std::max<std::size_t>(1, length / (count + 1));
    std::vector<Stage> stages;
    for (std::size_t j = 0; j < count; ++j) stages.push_back({std::ldexp(top, -static_cast<int>(j)), j * step});
    return ToleranceSchedule(std::move(stages));
  }

  std::span<const Stage> stages() const noexcept { return stages_; }
  std::size_t size() const noexcept { return stages_.size(); }
  const Stage& operator[](std::size_t j) const { return stages_.at(j); }
  bool empty() const noexcept { return stages_.empty(); }

  friend bool operator==(const ToleranceSchedule&, const ToleranceSchedule&) = default;

 private:
  void validate() const {
    if (stages_.empty()) throw Error(Errc::bad_schedule, "a schedule needs at least one stage");
    for (std::size_t j = 0; j < stages_.size(); ++j) {
      if (!(stages_[j].eps > 0.0)) throw Error(Errc::bad_schedule, "stage eps must be > 0");
      if (j > 0 && !(stages_[j].eps < stages_[j - 1].eps))
        throw Error(Errc::bad_schedule, "stage eps must strictly decrease");
      if (j > 0 && !(stages_[j].start > stages_[j - 1].start))
        throw Error(Errc::bad_schedule, "stage starts must strictly increase");
    }
  }

  std::vector<Stage> stages_;
};

enum class VerdictStatus { consistent, falsified };

struct Violation {
  std::size_t stage = 0;
  std::size_t index = 0;    // prefix position
  std::size_t partner = 0;  // second prefix position of the offending pair
  double gap = 0.0;
};

/// Finite prefixes can never prove an asymptotic property; a verdict only
/// says whether the prefix is consistent with it at the given schedule.
struct Verdict {
  VerdictStatus status = VerdictStatus::consistent;
  std::optional<Violation> witness;

  bool consistent() const noexcept { return status == VerdictStatus::consistent; }
};

/// The strict comparison d < eps used by every definition here. Kept as a
/// policy so test harnesses can inject a broken comparator.
struct StrictlyBelow {
  constexpr bool operator()(double d, double eps) const noexcept { return d < eps; }
};

namespace detail {

inline void require_prefix_len(const SequencePrefix& prefix, std::size_t min_len) {
  if (prefix.size() < min_len) {
    throw Error(Errc::short_prefix, "prefix has " + std::to_string(prefix.size()) + " points, need " +
                                        std::to_string(min_len));
  }
}

inline void require_schedule(const ToleranceSchedule& schedule) {
  if (schedule.empty()) throw Error(Errc::bad_schedule, "empty schedule");
}

inline Verdict falsified(std::size_t stage, std::size_t index, std::size_t partner, double gap) {
  return {VerdictStatus::falsified, Violation{stage, index, partner, gap}};
}

}  // namespace detail

/// Quasi-Cauchy at the schedule: every consecutive gap from position start_j
/// on is below eps_j. Returns the first violation, stage-major.
template <class Below = StrictlyBelow>
Verdict quasi_cauchy_test(const SequencePrefix& prefix, const ToleranceSchedule& schedule, Below below = {}) {
  detail::require_prefix_len(prefix, 2);
  detail::require_schedule(schedule);
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    for (std::size_t k = schedule[j].start; k + 1 < prefix.size(); ++k) {
      const double g = prefix.gap(k, k + 1);
      if (!below(g, schedule[j].eps)) return detail::falsified(j, k, k + 1, g);
    }
  }
  return {};
}

/// Cauchy at the schedule: every pair of positions >= start_j is closer than eps_j.
template <class Below = StrictlyBelow>
Verdict cauchy_test(const SequencePrefix& prefix, const ToleranceSchedule& schedule, Below below = {}) {
  detail::require_prefix_len(prefix, 2);
  detail::require_schedule(schedule);
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    for (std::size_t k = schedule[j].start; k < prefix.size(); ++k)
      for (std::size_t l = k + 1; l < prefix.size(); ++l) {
        const double g = prefix.gap(k, l);
        if (!below(g, schedule[j].eps)) return detail::falsified(j, k, l, g);
      }
  }
  return {};
}

/// Pseudo-Cauchy at the schedule: each stage tail holds some pair of distinct
/// positions closer than eps_j. Tails with fewer than two positions carry no
/// information and are skipped. A violation reports the closest tail pair.
template <class Below = StrictlyBelow>
Verdict pseudo_cauchy_test(const SequencePrefix& prefix, const ToleranceSchedule& schedule, Below below = {}) {
  detail::require_prefix_len(prefix, 2);
  detail::require_schedule(schedule);
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    const std::size_t start = schedule[j].start;
    if (start + 1 >= prefix.size()) continue;
    bool found = false;
    double best = kInfinity;
    std::size_t bk = start, bl = start + 1;
    for (std::size_t k = start; k < prefix.size() && !found; ++k)
      for (std::size_t l = k + 1; l < prefix.size(); ++l) {
        const double g = prefix.gap(k, l);
        if (below(g, schedule[j].eps)) {
          found = true;
          break;
        }
        if (g < best) {
          best = g;
          bk = k;
          bl = l;
        }
      }
    if (!found) return detail::falsified(j, bk, bl, best);
  }
  return {};
}

struct BourbakiQcResult {
  bool consistent = false;
  /// Smallest position from which the whole tail lies in one component.
  std::size_t n0 = 0;
  /// Smallest point index of that component.
  std::size_t center = 0;
};

/// Bourbaki quasi-Cauchy at one scale, with chains through the graph's
/// (ambient) space. Falsified when even the last two points are split.
inline BourbakiQcResult bourbaki_qc_test(const SequencePrefix& prefix, const ChainGraph& graph) {
  const std::size_t last = graph.component_of(prefix[prefix.size() - 1]);
  std::size_t n0 = prefix.size() - 1;
  while (n0 > 0 && graph.component_of(prefix[n0 - 1]) == last) --n0;
  const bool consistent = prefix.size() == 1 || n0 + 1 < prefix.size();
  return {consistent, n0, graph.component_members(last).front()};
}

inline BourbakiQcResult bourbaki_qc_test(const SequencePrefix& prefix, double eps) {
  return bourbaki_qc_test(prefix, ChainGraph(prefix.space(), eps));
}

struct SpliceResult {
  SequencePrefix spliced;
  /// embedding[k] = position of input point k inside the spliced prefix.
  std::vector<std::size_t> embedding;
  /// The input schedule with every start shifted to its embedded position.
  ToleranceSchedule derived;
};

/// Inserts shortest eps-chains between consecutive prefix points so the
/// result is quasi-Cauchy at the shifted schedule. The pair at position k
/// uses the scale of the last stage with start <= k; pairs before the first
/// stage are kept as they are.
inline SpliceResult splice_to_quasi_cauchy(const SequencePrefix& prefix, const ToleranceSchedule& schedule) {
  detail::require_schedule(schedule);
  const MetricSpace& space = prefix.space();
  std::vector<ChainGraph> graphs;
  graphs.reserve(schedule.size());
  for (const Stage& s : schedule.stages()) graphs.emplace_back(space, s.eps);

  std::vector<std::size_t> out{prefix[0]};
  std::vector<std::size_t> embedding{0};
  std::size_t stage = 0;
  bool active = false;
  for (std::size_t k = 0; k + 1 < prefix.size(); ++k) {
    while (stage + 1 < schedule.size() && schedule[stage + 1].start <= k) ++stage;
    if (!active && schedule[0].start <= k) active = true;
    if (!active) {
      out.push_back(prefix[k + 1]);
    } else {
      const auto chain = find_chain(graphs[stage], prefix[k], prefix[k + 1]);
      if (!chain) throw NoChainAtScale(stage, k);
      out.insert(out.end(), chain->indices.begin() + 1, chain->indices.end());
      if (chain->indices.size() == 1) out.push_back(prefix[k + 1]);
    }
    embedding.push_back(out.size() - 1);
  }

  std::vector<Stage> shifted;
  for (const Stage& s : schedule.stages()) {
    const std::size_t start = s.start < embedding.size() ? embedding[s.start]
                                                         : embedding.back() + (s.start - (embedding.size() - 1));
    shifted.push_back({s.eps, start});
  }
  return {SequencePrefix(space, std::move(out)), std::move(embedding), ToleranceSchedule(std::move(shifted))};
}

/// How extract_bqc_subsequence picks the surviving component at each stage.
enum class CensusRule {
  majority,        // most survivors; ties to the smallest component representative
  first_nonempty,  // the component of the earliest surviving position
};

struct StageCensus {
  double eps = 0.0;
  std::size_t component = 0;       // representative: smallest point index in it
  std::size_t survivors = 0;       // surviving positions after the stage
  std::size_t emitted = 0;         // position emitted at this stage
};

struct ExtractResult {
  std::vector<std::size_t> positions;  // strictly increasing prefix positions
  std::vector<StageCensus> stages;     // one per completed stage
  std::vector<std::size_t> survivors;  // surviving positions after the last completed stage
  bool exhausted = false;
};

/// Finite diagonal extraction of a Bourbaki quasi-Cauchy subsequence: stage j
/// keeps only the surviving positions lying in one eps_j-chain component and
/// emits the first survivor at or after start_j beyond the previous emission.
inline ExtractResult extract_bqc_subsequence(const SequencePrefix& prefix, const ToleranceSchedule& schedule,
                                             CensusRule rule = CensusRule::majority) {
  detail::require_prefix_len(prefix, 2);
  detail::require_schedule(schedule);
  ExtractResult out;
  std::vector<std::size_t> survivors(prefix.size());
  for (std::size_t p = 0; p < survivors.size(); ++p) survivors[p] = p;

  for (std::size_t j = 0; j < schedule.size(); ++j) {
    const ChainGraph graph(prefix.space(), schedule[j].eps);
    std::size_t chosen = 0;
    if (rule == CensusRule::majority) {
      std::map<std::size_t, std::size_t> census;  // representative -> count
      for (std::size_t p : survivors)
        ++census[graph.component_members(graph.component_of(prefix[p])).front()];
      std::size_t best = 0;
      for (const auto& [rep, count] : census) {
        if (count > best) {
          best = count;
          chosen = rep;
        }
      }
    } else {
      chosen = graph.component_members(graph.component_of(prefix[survivors.front()])).front();
    }
    std::vector<std::size_t> kept;
    for (std::size_t p : survivors)
      if (graph.component_members(graph.component_of(prefix[p])).front() == chosen) kept.push_back(p);

    const std::size_t floor =
        std::max(schedule[j].start, out.positions.empty() ? std::size_t{0} : out.positions.back() + 1);
    auto it = std::lower_bound(kept.begin(), kept.end(), floor);
    if (it == kept.end()) {
      out.exhausted = true;
      break;
    }
    survivors = std::move(kept);
    out.positions.push_back(*it);
    out.stages.push_back({schedule[j].eps, chosen, survivors.size(), *it});
  }
  out.survivors = survivors;
  return out;
}

}  // namespace chainscope
