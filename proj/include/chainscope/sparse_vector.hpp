#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <utility>
#include <vector>

namespace chainscope {

/// Finitely supported real sequence. Entries are kept sorted by coordinate
/// index and never store an exact zero, so two vectors are equal iff their
/// entry lists are equal.
class SparseVector {
 public:
  using Entry = std::pair<std::size_t, double>;

  SparseVector() = default;

  SparseVector(std::initializer_list<Entry> entries) {
    for (const auto& [index, value] : entries) add(index, value);
  }

  explicit SparseVector(const std::map<std::size_t, double>& entries) {
    for (const auto& [index, value] : entries) add(index, value);
  }

  /// Unit vector e_index.
  static SparseVector unit(std::size_t index, double scale = 1.0) {
    SparseVector v;
    v.add(index, scale);
    return v;
  }

  /// Adds value to the coordinate (so repeated indices accumulate).
  void add(std::size_t index, double value) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                               [](const Entry& e, std::size_t i) { return e.first < i; });
    if (it != entries_.end() && it->first == index) {
      it->second += value;
      if (it->second == 0.0) entries_.erase(it);
    } else if (value != 0.0) {
      entries_.insert(it, {index, value});
    }
  }

  double operator[](std::size_t index) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                               [](const Entry& e, std::size_t i) { return e.first < i; });
    return (it != entries_.end() && it->first == index) ? it->second : 0.0;
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t support_size() const noexcept { return entries_.size(); }

  /// Sum of |v_i|^p over coordinates i > n0.
  double tail_mass(std::size_t n0, double p) const {
    double mass = 0.0;
    for (const auto& [index, value] : entries_) {
      if (index > n0) mass += std::pow(std::abs(value), p);
    }
    return mass;
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

  /// Visits |a_i - b_i| for every i in the union of supports.
  template <class Fn>
  friend void for_each_abs_difference(const SparseVector& a, const SparseVector& b, Fn&& fn) {
    auto ia = a.entries_.begin();
    auto ib = b.entries_.begin();
    while (ia != a.entries_.end() || ib != b.entries_.end()) {
      if (ib == b.entries_.end() || (ia != a.entries_.end() && ia->first < ib->first)) {
        fn(std::abs(ia->second));
        ++ia;
      } else if (ia == a.entries_.end() || ib->first < ia->first) {
        fn(std::abs(ib->second));
        ++ib;
      } else {
        fn(std::abs(ia->second - ib->second));
        ++ia;
        ++ib;
      }
    }
  }

 private:
  std::vector<Entry> entries_;
};

inline double sup_distance(const SparseVector& a, const SparseVector& b) {
  double best = 0.0;
  for_each_abs_difference(a, b, [&](double d) { best = std::max(best, d); });
  return best;
}

inline double p_distance(const SparseVector& a, const SparseVector& b, double p) {
  double sum = 0.0;
  for_each_abs_difference(a, b, [&](double d) { sum += std::pow(d, p); });
  return std::pow(sum, 1.0 / p);
}

}  // namespace chainscope
