#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chainscope {

enum class Errc {
  malformed_input,
  metric_violation,
  index_out_of_range,
  non_positive_epsilon,
  non_positive_length,
  empty_subset,
  not_a_cover,
  short_prefix,
  bad_schedule,
  no_chain_at_scale,
  degenerate_space,
  overlapping_balls,
  empty_family,
  inconsistent_levels,
  unknown_fixture,
  bad_param,
  bad_spec,
  too_large,
  precondition,
  postcondition,
};

inline std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::malformed_input: return "MalformedInput";
    case Errc::metric_violation: return "MetricViolation";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::non_positive_epsilon: return "NonPositiveEpsilon";
    case Errc::non_positive_length: return "NonPositiveLength";
    case Errc::empty_subset: return "EmptySubset";
    case Errc::not_a_cover: return "NotACover";
    case Errc::short_prefix: return "ShortPrefix";
    case Errc::bad_schedule: return "BadSchedule";
    case Errc::no_chain_at_scale: return "NoChainAtScale";
    case Errc::degenerate_space: return "DegenerateSpace";
    case Errc::overlapping_balls: return "OverlappingBalls";
    case Errc::empty_family: return "EmptyFamily";
    case Errc::inconsistent_levels: return "InconsistentLevels";
    case Errc::unknown_fixture: return "UnknownFixture";
    case Errc::bad_param: return "BadParam";
    case Errc::bad_spec: return "BadSpec";
    case Errc::too_large: return "TooLarge";
    case Errc::precondition: return "PreconditionFailed";
    case Errc::postcondition: return "PostconditionFailed";
  }
  return "Unknown";
}

/// Base exception for every contract failure in the library. The code
/// identifies the failure class; the message carries the details.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// A distance oracle broke a metric axiom. For the triangle axiom the witness
/// is (i, k, j) with d(i,k) > d(i,j) + d(j,k); for two-point axioms the third
/// entry repeats the second.
class MetricViolation : public Error {
 public:
  MetricViolation(std::string axiom, std::array<std::size_t, 3> witness, const std::string& detail)
      : Error(Errc::metric_violation, axiom + " " + detail),
        axiom_(std::move(axiom)),
        witness_(witness) {}

  const std::string& axiom() const noexcept { return axiom_; }
  const std::array<std::size_t, 3>& witness() const noexcept { return witness_; }

 private:
  std::string axiom_;
  std::array<std::size_t, 3> witness_;
};

class NoChainAtScale : public Error {
 public:
  NoChainAtScale(std::size_t stage, std::size_t position)
      : Error(Errc::no_chain_at_scale, "no chain at stage " + std::to_string(stage) +
                                           " for prefix pair at position " +
                                           std::to_string(position)),
        stage_(stage),
        position_(position) {}

  std::size_t stage() const noexcept { return stage_; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t stage_;
  std::size_t position_;
};

class OverlappingBalls : public Error {
 public:
  OverlappingBalls(std::size_t first, std::size_t second, std::size_t point)
      : Error(Errc::overlapping_balls, "balls " + std::to_string(first) + " and " +
                                           std::to_string(second) + " share point " +
                                           std::to_string(point)),
        first_(first),
        second_(second),
        point_(point) {}

  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }
  std::size_t point() const noexcept { return point_; }

 private:
  std::size_t first_;
  std::size_t second_;
  std::size_t point_;
};

namespace detail {

inline void require_positive_eps(double eps, const char* what = "eps") {
  if (!(eps > 0.0)) {
    throw Error(Errc::non_positive_epsilon, std::string(what) + " must be > 0, got " +
                                                std::to_string(eps));
  }
}

}  // namespace detail

}  // namespace chainscope
