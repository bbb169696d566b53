#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "chainscope/error.hpp"
#include "chainscope/sparse_vector.hpp"

namespace chainscope {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultTol = 1e-12;

// Provider payloads. Each one owns the coordinate data of all n points.

/// Row-major n x n distance table.
struct ExplicitMatrix {
  std::vector<double> d;
};

/// n points of R^dim, row-major.
struct Euclidean {
  std::size_t dim = 1;
  std::vector<double> coords;
};

/// Points of l^inf with finite support.
struct SupNormSparse {
  std::vector<SparseVector> points;
};

/// Points of l^p (p >= 1) with finite support.
struct PNormSparse {
  double p = 2.0;
  std::vector<SparseVector> points;
};

/// Reals under min{cap, |x - y|}.
struct BoundedUsual {
  double cap = 1.0;
  std::vector<double> x;
};

/// Real functions on a finite domain under the sup metric; row i holds the
/// values of function i at each domain point.
struct FunctionSup {
  std::size_t domain_size = 1;
  std::vector<double> values;
};

using ProviderData =
    std::variant<ExplicitMatrix, Euclidean, SupNormSparse, PNormSparse, BoundedUsual, FunctionSup>;

enum class ProviderKind { explicit_matrix, euclidean, sup_norm_sparse, p_norm_sparse, bounded_usual, function_sup };

inline std::string provider_name(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::explicit_matrix: return "explicit-matrix";
    case ProviderKind::euclidean: return "euclidean";
    case ProviderKind::sup_norm_sparse: return "sup-norm-sparse";
    case ProviderKind::p_norm_sparse: return "p-norm-sparse";
    case ProviderKind::bounded_usual: return "bounded-usual";
    case ProviderKind::function_sup: return "function-sup";
  }
  return "unknown";
}

/// A finite metric space: an immutable point set with a validated distance
/// oracle. All member functions are const and safe for concurrent readers.
class MetricSpace {
 public:
  /// Validates the provider data and the metric axioms. Throws Error
  /// (MalformedInput) on shape problems and MetricViolation on axiom failures.
  static MetricSpace build(ProviderData data, double tol = kDefaultTol) {
    MetricSpace space(std::move(data), tol);
    space.check_shape();
    space.validate_axioms();
    return space;
  }

  std::size_t size() const noexcept { return n_; }
  double tol() const noexcept { return tol_; }
  const ProviderData& data() const noexcept { return data_; }
  ProviderKind provider() const noexcept { return static_cast<ProviderKind>(data_.index()); }

  /// The provider's scalar parameter: dim, p, cap or domain size (0 for matrices).
  double provider_param() const {
    return std::visit(
        [](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Euclidean>) return static_cast<double>(p.dim);
          else if constexpr (std::is_same_v<T, PNormSparse>) return p.p;
          else if constexpr (std::is_same_v<T, BoundedUsual>) return p.cap;
          else if constexpr (std::is_same_v<T, FunctionSup>) return static_cast<double>(p.domain_size);
          else return 0.0;
        },
        data_);
  }

  void check_index(std::size_t i) const {
    if (i >= n_) {
      throw Error(Errc::index_out_of_range,
                  "index " + std::to_string(i) + " not in [0, " + std::to_string(n_) + ")");
    }
  }

  double distance(std::size_t i, std::size_t j) const {
    check_index(i);
    check_index(j);
    return raw_distance(i, j);
  }

  /// Unchecked distance for hot loops over known-valid indices.
  double raw_distance(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    return std::visit([&](const auto& p) { return provider_distance(p, i, j); }, data_);
  }

  double diameter() const {
    double best = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) best = std::max(best, raw_distance(i, j));
    return best;
  }

  /// Smallest nonzero pairwise distance, +infinity if there is none.
  double min_positive_distance() const {
    double best = kInfinity;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double d = raw_distance(i, j);
        if (d > 0.0) best = std::min(best, d);
      }
    return best;
  }

  /// Restriction of the space to the given points, in the given order. The
  /// result inherits validity and is not re-validated.
  MetricSpace subspace(std::span<const std::size_t> indices) const {
    for (std::size_t i : indices) check_index(i);
    ProviderData sub = std::visit(
        [&](const auto& p) -> ProviderData { return restrict_provider(p, indices); }, data_);
    return MetricSpace(std::move(sub), tol_);
  }

 private:
  MetricSpace(ProviderData data, double tol) : data_(std::move(data)), tol_(tol) {
    n_ = std::visit([](const auto& p) { return point_count(p); }, data_);
  }

  // ---- provider dispatch -------------------------------------------------

  static std::size_t point_count(const ExplicitMatrix& p) {
    const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(p.d.size()))));
    return n * n == p.d.size() ? n : 0;
  }
  static std::size_t point_count(const Euclidean& p) { return p.dim == 0 ? 0 : p.coords.size() / p.dim; }
  static std::size_t point_count(const SupNormSparse& p) { return p.points.size(); }
  static std::size_t point_count(const PNormSparse& p) { return p.points.size(); }
  static std::size_t point_count(const BoundedUsual& p) { return p.x.size(); }
  static std::size_t point_count(const FunctionSup& p) {
    return p.domain_size == 0 ? 0 : p.values.size() / p.domain_size;
  }

  double provider_distance(const ExplicitMatrix& p, std::size_t i, std::size_t j) const {
    return p.d[i * n_ + j];
  }
  static double provider_distance(const Euclidean& p, std::size_t i, std::size_t j) {
    double sum = 0.0;
    const double* a = p.coords.data() + i * p.dim;
    const double* b = p.coords.data() + j * p.dim;
    if (p.dim == 1) return std::abs(a[0] - b[0]);
    for (std::size_t k = 0; k < p.dim; ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(sum);
  }
  static double provider_distance(const SupNormSparse& p, std::size_t i, std::size_t j) {
    return sup_distance(p.points[i], p.points[j]);
  }
  static double provider_distance(const PNormSparse& p, std::size_t i, std::size_t j) {
    return p_distance(p.points[i], p.points[j], p.p);
  }
  static double provider_distance(const BoundedUsual& p, std::size_t i, std::size_t j) {
    return std::min(p.cap, std::abs(p.x[i] - p.x[j]));
  }
  static double provider_distance(const FunctionSup& p, std::size_t i, std::size_t j) {
    double best = 0.0;
    const double* a = p.values.data() + i * p.domain_size;
    const double* b = p.values.data() + j * p.domain_size;
    for (std::size_t k = 0; k < p.domain_size; ++k) best = std::max(best, std::abs(a[k] - b[k]));
    return best;
  }

  ProviderData restrict_provider(const ExplicitMatrix& p, std::span<const std::size_t> idx) const {
    ExplicitMatrix out;
    out.d.reserve(idx.size() * idx.size());
    for (std::size_t a : idx)
      for (std::size_t b : idx) out.d.push_back(p.d[a * n_ + b]);
    return out;
  }
  static ProviderData restrict_provider(const Euclidean& p, std::span<const std::size_t> idx) {
    Euclidean out{p.dim, {}};
    for (std::size_t a : idx)
      out.coords.insert(out.coords.end(), p.coords.begin() + static_cast<std::ptrdiff_t>(a * p.dim),
                        p.coords.begin() + static_cast<std::ptrdiff_t>((a + 1) * p.dim));
    return out;
  }
  static ProviderData restrict_provider(const SupNormSparse& p, std::span<const std::size_t> idx) {
    SupNormSparse out;
    for (std::size_t a : idx) out.points.push_back(p.points[a]);
    return out;
  }
  static ProviderData restrict_provider(const PNormSparse& p, std::span<const std::size_t> idx) {
    PNormSparse out{p.p, {}};
    for (std::size_t a : idx) out.points.push_back(p.points[a]);
    return out;
  }
  static ProviderData restrict_provider(const BoundedUsual& p, std::span<const std::size_t> idx) {
    BoundedUsual out{p.cap, {}};
    for (std::size_t a : idx) out.x.push_back(p.x[a]);
    return out;
  }
  static ProviderData restrict_provider(const FunctionSup& p, std::span<const std::size_t> idx) {
    FunctionSup out{p.domain_size, {}};
    for (std::size_t a : idx)
      out.values.insert(out.values.end(),
                        p.values.begin() + static_cast<std::ptrdiff_t>(a * p.domain_size),
                        p.values.begin() + static_cast<std::ptrdiff_t>((a + 1) * p.domain_size));
    return out;
  }

  // ---- validation --------------------------------------------------------

  void check_shape() const {
    auto fail = [](const std::string& what) { throw Error(Errc::malformed_input, what); };
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ExplicitMatrix>) {
            if (p.d.empty() || n_ == 0) fail("distance matrix must be square and nonempty");
          } else if constexpr (std::is_same_v<T, Euclidean>) {
            if (p.dim == 0) fail("euclidean dimension must be >= 1");
            if (p.coords.size() % p.dim != 0) fail("coordinate count is not a multiple of dim");
          } else if constexpr (std::is_same_v<T, PNormSparse>) {
            if (!(p.p >= 1.0) || !std::isfinite(p.p)) fail("p-norm requires finite p >= 1");
          } else if constexpr (std::is_same_v<T, BoundedUsual>) {
            if (!(p.cap > 0.0)) fail("bounded-usual cap must be > 0");
            for (double v : p.x)
              if (!std::isfinite(v)) fail("non-finite coordinate");
          } else if constexpr (std::is_same_v<T, FunctionSup>) {
            if (p.domain_size == 0) fail("function-sup domain must be nonempty");
            if (p.values.size() % p.domain_size != 0) fail("value count is not a multiple of domain size");
          }
        },
        data_);
    if (n_ == 0) fail("a metric space needs at least one point");
    if (!(tol_ >= 0.0)) fail("tolerance must be nonnegative");
  }

  void validate_pair(std::size_t i, std::size_t j) const {
    const double dij = raw_distance(i, j);
    const std::array<std::size_t, 3> w{i, j, j};
    if (!std::isfinite(dij)) throw MetricViolation("finiteness", w, "d(i,j) is not finite");
    if (dij < 0.0) throw MetricViolation("nonnegativity", w, "d(i,j) < 0");
    if (std::abs(dij - raw_distance(j, i)) > tol_) throw MetricViolation("symmetry", w, "d(i,j) != d(j,i)");
  }

  void validate_triple(std::size_t i, std::size_t k, std::size_t j) const {
    if (raw_distance(i, k) > raw_distance(i, j) + raw_distance(j, k) + tol_) {
      throw MetricViolation("triangle", {i, k, j},
                            "d(" + std::to_string(i) + "," + std::to_string(k) + ") > d(" +
                                std::to_string(i) + "," + std::to_string(j) + ") + d(" +
                                std::to_string(j) + "," + std::to_string(k) + ")");
    }
  }

  void validate_axioms() const {
    if (const auto* m = std::get_if<ExplicitMatrix>(&data_)) {
      for (std::size_t i = 0; i < n_; ++i) {
        if (m->d[i * n_ + i] != 0.0) throw MetricViolation("diagonal", {i, i, i}, "d(i,i) != 0");
      }
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) validate_pair(i, j);
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t k = 0; k < n_; ++k)
          for (std::size_t j = 0; j < n_; ++j) validate_triple(i, k, j);
      return;
    }
    // Derived providers are metrics by construction; a bounded sample of
    // triples guards against implementation or data errors.
    constexpr std::size_t kTripleBudget = 100000;
    const std::size_t n = n_;
    if (n <= 46) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) validate_pair(i, j);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t j = 0; j < n; ++j) validate_triple(i, k, j);
      return;
    }
    std::mt19937_64 rng(0x5eedc0ffeeULL);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t t = 0; t < kTripleBudget; ++t) {
      const std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
      validate_pair(i, j);
      validate_triple(i, k, j);
    }
  }

  ProviderData data_;
  double tol_ = kDefaultTol;
  std::size_t n_ = 0;
};

/// Builds and validates a metric space from provider data.
inline MetricSpace build_space(ProviderData data, double tol = kDefaultTol) {
  return MetricSpace::build(std::move(data), tol);
}

/// Convenience: explicit matrix from nested rows.
inline MetricSpace matrix_space(const std::vector<std::vector<double>>& rows, double tol = kDefaultTol) {
  ExplicitMatrix m;
  for (const auto& row : rows) {
    if (row.size() != rows.size()) throw Error(Errc::malformed_input, "distance matrix is not square");
    m.d.insert(m.d.end(), row.begin(), row.end());
  }
  return build_space(std::move(m), tol);
}

/// Convenience: points on the real line under the usual metric.
inline MetricSpace line_space(std::vector<double> xs, double tol = kDefaultTol) {
  return build_space(Euclidean{1, std::move(xs)}, tol);
}

/// Degree of isolation I(x) = d(x, X \ {x}); +infinity on a singleton.
inline double isolation(const MetricSpace& space, std::size_t i) {
  space.check_index(i);
  double best = kInfinity;
  for (std::size_t j = 0; j < space.size(); ++j) {
    if (j != i) best = std::min(best, space.raw_distance(i, j));
  }
  return best;
}

/// Sorted distinct positive pairwise distances.
inline std::vector<double> distance_breakpoints(const MetricSpace& space) {
  std::vector<double> out;
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t j = i + 1; j < space.size(); ++j) {
      const double d = space.raw_distance(i, j);
      if (d > 0.0) out.push_back(d);
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace chainscope
