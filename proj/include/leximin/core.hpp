#pragma once

// Utility vectors and the (alpha, epsilon)-approximate leximin order.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leximin/errors.hpp"

namespace leximin {

inline constexpr double kDefaultTolerance = 1e-9;

/// Objective values f_1(x), ..., f_n(x) of one solution.
class UtilityVector {
 public:
  UtilityVector() = default;

  explicit UtilityVector(std::vector<double> values, double tol = kDefaultTolerance)
      : values_(std::move(values)) {
    if (values_.empty()) throw InputError("utility vector must have at least one entry");
    for (double v : values_) {
      if (!std::isfinite(v)) throw InputError("utility vector entries must be finite");
      if (v < -tol) throw InputError("utility vector entries must be non-negative");
    }
  }

  UtilityVector(std::initializer_list<double> values)
      : UtilityVector(std::vector<double>(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  friend bool operator==(const UtilityVector&, const UtilityVector&) = default;

 private:
  std::vector<double> values_;
};

/// Ascending ordered outcomes V^1(x) <= ... <= V^n(x).
class SortedUtilityVector {
 public:
  SortedUtilityVector() = default;

  std::size_t size() const noexcept { return sorted_.size(); }
  // 0-based; V^k corresponds to operator[](k - 1).
  double operator[](std::size_t i) const { return sorted_[i]; }
  std::span<const double> values() const noexcept { return sorted_; }
  const std::vector<double>& vector() const noexcept { return sorted_; }
  auto begin() const noexcept { return sorted_.begin(); }
  auto end() const noexcept { return sorted_.end(); }

  // Sum of the smallest `count` values.
  double prefix_sum(std::size_t count) const {
    double s = 0.0;
    for (std::size_t i = 0; i < count && i < sorted_.size(); ++i) s += sorted_[i];
    return s;
  }

  friend bool operator==(const SortedUtilityVector&, const SortedUtilityVector&) = default;
  friend SortedUtilityVector sort_outcomes(const UtilityVector& u);

 private:
  explicit SortedUtilityVector(std::vector<double> sorted) : sorted_(std::move(sorted)) {}
  std::vector<double> sorted_;
};

inline SortedUtilityVector sort_outcomes(const UtilityVector& u) {
  std::vector<double> sorted = u.vector();
  std::stable_sort(sorted.begin(), sorted.end());
  return SortedUtilityVector(std::move(sorted));
}

/// Multiplicative factor alpha in (0,1] and additive factor epsilon >= 0.
struct ApproxFactors {
  double alpha = 1.0;
  double epsilon = 0.0;

  ApproxFactors() = default;
  ApproxFactors(double a, double e) : alpha(a), epsilon(e) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in (0, 1]");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InputError("epsilon must be >= 0");
  }

  // Multiplicative error factor 1 - alpha.
  double error() const noexcept { return 1.0 - alpha; }

  friend bool operator==(const ApproxFactors&, const ApproxFactors&) = default;
};

/// Index k (1-based) at which y beats x, and by how much.
struct PreferenceWitness {
  std::size_t k = 0;
  double margin = 0.0;  // V^k(y) - (V^k(x) + epsilon) / alpha
};

/// y is (alpha, epsilon)-leximin-preferred over x iff for some k the k-1 smallest
/// values of y are at least those of x and V^k(y) > (V^k(x) + epsilon) / alpha.
/// Returns the witness with the smallest such k.
inline std::optional<PreferenceWitness> is_leximin_preferred(const SortedUtilityVector& y,
                                                             const SortedUtilityVector& x,
                                                             const ApproxFactors& f,
                                                             double tol = kDefaultTolerance) {
  if (y.size() != x.size()) throw InputError("utility vectors differ in length");
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double threshold = (x[i] + f.epsilon) / f.alpha;
    if (y[i] > threshold + tol) return PreferenceWitness{i + 1, y[i] - threshold};
    if (y[i] < x[i] - tol) break;
  }
  return std::nullopt;
}

inline std::optional<PreferenceWitness> is_leximin_preferred(const UtilityVector& y,
                                                             const UtilityVector& x,
                                                             const ApproxFactors& f,
                                                             double tol = kDefaultTolerance) {
  if (y.size() != x.size()) throw InputError("utility vectors differ in length");
  return is_leximin_preferred(sort_outcomes(y), sort_outcomes(x), f, tol);
}

/// All pairs (i, j) with candidates[i] preferred over candidates[j].
inline std::set<std::pair<std::size_t, std::size_t>> relation_set(
    std::span<const UtilityVector> candidates, const ApproxFactors& f,
    double tol = kDefaultTolerance) {
  std::vector<SortedUtilityVector> sorted;
  sorted.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (c.size() != candidates.front().size()) throw InputError("candidates differ in length");
    sorted.push_back(sort_outcomes(c));
  }
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    for (std::size_t j = 0; j < sorted.size(); ++j)
      if (i != j && is_leximin_preferred(sorted[i], sorted[j], f, tol)) out.emplace(i, j);
  return out;
}

/// True iff no candidate is (alpha, epsilon)-leximin-preferred over x.
inline bool is_approx_leximin_optimal(const UtilityVector& x,
                                      std::span<const UtilityVector> candidates,
                                      const ApproxFactors& f, double tol = kDefaultTolerance) {
  const auto sx = sort_outcomes(x);
  return std::none_of(candidates.begin(), candidates.end(), [&](const UtilityVector& c) {
    return is_leximin_preferred(sort_outcomes(c), sx, f, tol).has_value();
  });
}

inline double egalitarian_value(const UtilityVector& x) {
  return *std::min_element(x.begin(), x.end());
}

/// Guarantee obtained by the ordered-outcomes loop when each subproblem is solved
/// to (alpha, epsilon): (alpha^2 / (1 - alpha + alpha^2), epsilon / (1 - alpha + alpha^2)).
inline ApproxFactors factor_transform(const ApproxFactors& f) {
  const double denom = 1.0 - f.alpha + f.alpha * f.alpha;
  return ApproxFactors(std::min(1.0, f.alpha * f.alpha / denom), f.epsilon / denom);
}

/// Classical (exact) leximin comparison of sorted vectors.
inline std::strong_ordering leximin_compare(const SortedUtilityVector& a,
                                            const SortedUtilityVector& b) {
  if (a.size() != b.size()) throw InputError("utility vectors differ in length");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return std::strong_ordering::less;
    if (a[i] > b[i]) return std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

}  // namespace leximin
