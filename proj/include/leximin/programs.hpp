#pragma once

// Multi-objective problems and the per-iteration single-objective programs
// used by the ordered-outcomes loop.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "leximin/core.hpp"
#include "leximin/errors.hpp"
#include "leximin/linprog.hpp"

namespace leximin {

// Points produced by LP backends are accepted when every residual is within this.
inline constexpr double kFeasibilityTolerance = 1e-7;

struct LinearObjectives {
  std::size_t dim = 0;
  std::vector<Constraint<double>> constraints;  // rows over x
  std::vector<Bound<double>> bounds;            // one per coordinate of x
  std::vector<std::vector<double>> objectives;  // f_i(x) = objectives[i] . x
};

struct FiniteObjectives {
  std::vector<UtilityVector> candidates;
};

/// Either a point x in R^dim or the index of a finite candidate.
using Solution = std::variant<std::vector<double>, std::size_t>;

class MultiObjectiveProblem {
 public:
  static MultiObjectiveProblem linear(std::size_t dim, std::vector<Constraint<double>> constraints,
                                      std::vector<std::vector<double>> objectives,
                                      std::vector<Bound<double>> bounds = {}) {
    LinearObjectives l{dim, std::move(constraints), std::move(bounds), std::move(objectives)};
    if (l.bounds.empty()) l.bounds.assign(dim, Bound<double>{});
    if (l.objectives.empty()) throw InputError("problem needs at least one objective");
    if (l.bounds.size() != dim) throw InputError("bounds count differs from dimension");
    for (const auto& c : l.constraints)
      if (c.coeffs.size() != dim) throw InputError("constraint row length differs from dimension");
    for (const auto& o : l.objectives)
      if (o.size() != dim) throw InputError("objective row length differs from dimension");
    MultiObjectiveProblem p;
    p.data_ = std::move(l);
    return p;
  }

  static MultiObjectiveProblem finite(std::vector<UtilityVector> candidates) {
    if (candidates.empty()) throw InputError("finite problem needs at least one candidate");
    for (const auto& c : candidates)
      if (c.size() != candidates.front().size()) throw InputError("candidates differ in length");
    MultiObjectiveProblem p;
    p.data_ = FiniteObjectives{std::move(candidates)};
    return p;
  }

  bool is_linear() const noexcept { return std::holds_alternative<LinearObjectives>(data_); }
  bool is_finite() const noexcept { return !is_linear(); }

  const LinearObjectives& as_linear() const {
    if (!is_linear()) throw InputError("operation needs a linear problem");
    return std::get<LinearObjectives>(data_);
  }
  const FiniteObjectives& as_finite() const {
    if (!is_finite()) throw InputError("operation needs a finite problem");
    return std::get<FiniteObjectives>(data_);
  }

  std::size_t num_objectives() const {
    return is_linear() ? as_linear().objectives.size() : as_finite().candidates.front().size();
  }

  /// f_1(x), ..., f_n(x) (unsorted, unvalidated).
  std::vector<double> evaluate(const Solution& s) const {
    if (is_linear()) {
      const auto& l = as_linear();
      const auto& x = point_of(s);
      std::vector<double> out;
      out.reserve(l.objectives.size());
      for (const auto& c : l.objectives) out.push_back(dot(c, x));
      return out;
    }
    return as_finite().candidates.at(index_of(s)).vector();
  }

  UtilityVector utilities(const Solution& s) const {
    auto v = evaluate(s);
    for (auto& e : v) {
      if (e < -kFeasibilityTolerance) throw InputError("objective value is negative on a feasible point");
      e = std::max(e, 0.0);
    }
    return UtilityVector(std::move(v));
  }

  /// x in S within `tol`.
  bool contains(const Solution& s, double tol = kFeasibilityTolerance) const {
    if (is_finite()) return std::holds_alternative<std::size_t>(s) && index_of(s) < as_finite().candidates.size();
    if (!std::holds_alternative<std::vector<double>>(s)) return false;
    const auto& l = as_linear();
    const auto& x = std::get<std::vector<double>>(s);
    if (x.size() != l.dim) return false;
    return region_violation(x) <= tol;
  }

  double region_violation(const std::vector<double>& x) const {
    const auto& l = as_linear();
    LinearProgram lp(l.dim);
    lp.constraints = l.constraints;
    lp.bounds = l.bounds;
    return max_violation(lp, x);
  }

  std::size_t dim() const { return as_linear().dim; }

  static const std::vector<double>& point_of(const Solution& s) {
    if (!std::holds_alternative<std::vector<double>>(s)) throw InputError("expected a point solution");
    return std::get<std::vector<double>>(s);
  }
  static std::size_t index_of(const Solution& s) {
    if (!std::holds_alternative<std::size_t>(s)) throw InputError("expected a candidate index");
    return std::get<std::size_t>(s);
  }

 private:
  std::variant<LinearObjectives, FiniteObjectives> data_;
};

/// Constants z_1..z_{t-1} fixed so far and the solutions that produced them.
template <class Sol>
struct BasicIterationLedger {
  std::vector<double> z;
  std::vector<Sol> witnesses;

  // Current iteration (1-based): the next OP call solves for z_t.
  std::size_t t() const noexcept { return z.size() + 1; }

  void record(double z_t, Sol x) {
    z.push_back(z_t);
    witnesses.push_back(std::move(x));
  }

  // z_1 + ... + z_count.
  double prefix(std::size_t count) const {
    double s = 0.0;
    for (std::size_t i = 0; i < count && i < z.size(); ++i) s += z[i];
    return s;
  }
};

using IterationLedger = BasicIterationLedger<Solution>;

/// Ledger truncated to its first t-1 constants, i.e. the state entering iteration t.
template <class Sol>
BasicIterationLedger<Sol> ledger_at(const BasicIterationLedger<Sol>& ledger, std::size_t t) {
  BasicIterationLedger<Sol> out;
  for (std::size_t i = 0; i + 1 < t && i < ledger.z.size(); ++i) out.record(ledger.z[i], ledger.witnesses[i]);
  return out;
}

// ---------------------------------------------------------------------------
// P2-Compact: prefix sums of the sorted values.

/// Σ_{i<=t} V^i(x) - Σ_{i<t} z_i for the iteration described by `ledger`.
/// Throws InfeasibleError when x is outside S (index 0) or violates a prefix
/// constraint (index = prefix length).
inline double eval_p2compact_objective(const MultiObjectiveProblem& problem, const IterationLedger& ledger,
                                       const Solution& x, double tol = kFeasibilityTolerance) {
  if (!problem.contains(x, tol)) throw InfeasibleError("point is outside the feasible region", 0);
  const std::size_t t = ledger.t();
  if (t > problem.num_objectives()) throw InputError("iteration exceeds number of objectives");
  auto v = problem.evaluate(x);
  std::stable_sort(v.begin(), v.end());
  double sum = 0.0;
  for (std::size_t l = 1; l < t; ++l) {
    sum += v[l - 1];
    if (sum < ledger.prefix(l) - tol)
      throw InfeasibleError("prefix-sum constraint " + std::to_string(l) + " is violated", l);
  }
  return sum + v[t - 1] - ledger.prefix(t - 1);
}

inline bool check_p2compact_feasible(const MultiObjectiveProblem& problem, const IterationLedger& ledger,
                                     const Solution& x, double tol = kFeasibilityTolerance) {
  try {
    eval_p2compact_objective(problem, ledger, x, tol);
    return true;
  } catch (const InfeasibleError&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// P3: linearised prefix sums with auxiliaries y_l (free) and m_{l,j} >= 0.

struct P3Layout {
  std::size_t dim = 0, n = 0, t = 0;

  std::size_t x(std::size_t j) const { return j; }
  std::size_t z() const { return dim; }
  std::size_t y(std::size_t l) const { return dim + l; }  // l in [1, t]
  std::size_t m(std::size_t l, std::size_t j) const { return dim + 1 + t + (l - 1) * n + j; }
  std::size_t num_vars() const { return dim + 1 + t + t * n; }
};

struct P3Program {
  LinearProgram lp;
  P3Layout layout;
};

struct P3Witness {
  std::vector<double> y;               // y_1..y_t
  std::vector<std::vector<double>> m;  // m[l-1][j]
};

/// Rows over (x, extra) for the feasible region S, padded with zeros.
inline void append_region_rows(LinearProgram& lp, const LinearObjectives& l) {
  for (const auto& c : l.constraints) {
    std::vector<double> row(lp.num_vars(), 0.0);
    std::copy(c.coeffs.begin(), c.coeffs.end(), row.begin());
    lp.add_constraint(std::move(row), c.rel, c.rhs);
  }
}

/// P3 at iteration ledger.t(): maximize z_t. z_t is left free (see README).
inline P3Program build_p3(const MultiObjectiveProblem& problem, const IterationLedger& ledger) {
  const auto& l = problem.as_linear();
  const std::size_t n = l.objectives.size();
  const std::size_t t = ledger.t();
  if (t > n) throw InputError("iteration exceeds number of objectives");
  P3Layout lay{l.dim, n, t};
  LinearProgram lp(lay.num_vars(), Direction::maximize);
  for (std::size_t j = 0; j < l.dim; ++j) {
    lp.bounds[j] = l.bounds[j];
    lp.names[j] = "x" + std::to_string(j + 1);
  }
  lp.objective[lay.z()] = 1.0;
  lp.bounds[lay.z()] = Bound<double>::free();
  lp.names[lay.z()] = "z" + std::to_string(t);
  for (std::size_t k = 1; k <= t; ++k) {
    lp.bounds[lay.y(k)] = Bound<double>::free();
    lp.names[lay.y(k)] = "y" + std::to_string(k);
    for (std::size_t j = 0; j < n; ++j) lp.names[lay.m(k, j)] = "m" + std::to_string(k) + "_" + std::to_string(j + 1);
  }
  append_region_rows(lp, l);
  for (std::size_t k = 1; k <= t; ++k) {
    std::vector<double> row(lay.num_vars(), 0.0);
    row[lay.y(k)] = static_cast<double>(k);
    for (std::size_t j = 0; j < n; ++j) row[lay.m(k, j)] = -1.0;
    if (k < t) {
      lp.add_constraint(std::move(row), Relation::greater_equal, ledger.prefix(k));
    } else {
      row[lay.z()] = -1.0;
      lp.add_constraint(std::move(row), Relation::greater_equal, ledger.prefix(t - 1));
    }
  }
  for (std::size_t k = 1; k <= t; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> row(lay.num_vars(), 0.0);
      row[lay.m(k, j)] = 1.0;
      row[lay.y(k)] = -1.0;
      for (std::size_t d = 0; d < l.dim; ++d) row[d] += l.objectives[j][d];
      lp.add_constraint(std::move(row), Relation::greater_equal, 0.0);
    }
  }
  return {std::move(lp), lay};
}

/// Full P3 assignment from its parts.
inline std::vector<double> p3_assignment(const P3Layout& lay, const std::vector<double>& x, double z_t,
                                         const P3Witness& w) {
  std::vector<double> v(lay.num_vars(), 0.0);
  std::copy(x.begin(), x.end(), v.begin());
  v[lay.z()] = z_t;
  for (std::size_t k = 1; k <= lay.t; ++k) {
    v[lay.y(k)] = w.y[k - 1];
    for (std::size_t j = 0; j < lay.n; ++j) v[lay.m(k, j)] = w.m[k - 1][j];
  }
  return v;
}

/// y_l = V^l(x), m_{l,j} = max(0, V^l(x) - f_j(x)).
inline P3Witness p2_to_p3_witness(const MultiObjectiveProblem& problem, const IterationLedger& ledger,
                                  const std::vector<double>& x, double z_t, double tol = kFeasibilityTolerance) {
  const double value = eval_p2compact_objective(problem, ledger, x, tol);
  if (z_t > value + tol) throw InfeasibleError("z_t exceeds the value attained by x", ledger.t());
  const auto f = problem.evaluate(x);
  auto sorted = f;
  std::stable_sort(sorted.begin(), sorted.end());
  P3Witness w;
  for (std::size_t k = 1; k <= ledger.t(); ++k) {
    const double vk = sorted[k - 1];
    w.y.push_back(vk);
    std::vector<double> row;
    for (double fj : f) row.push_back(std::max(0.0, vk - fj));
    w.m.push_back(std::move(row));
  }
  return w;
}

/// Drops the auxiliaries of a P3-feasible assignment.
inline std::pair<std::vector<double>, double> p3_to_p2_projection(const P3Program& p3,
                                                                  const std::vector<double>& assignment,
                                                                  double tol = kFeasibilityTolerance) {
  if (assignment.size() != p3.layout.num_vars()) throw InputError("assignment length differs from P3 layout");
  if (max_violation(p3.lp, assignment) > tol) throw InfeasibleError("assignment violates P3", 0);
  std::vector<double> x(assignment.begin(), assignment.begin() + static_cast<std::ptrdiff_t>(p3.layout.dim));
  return {std::move(x), assignment[p3.layout.z()]};
}

// ---------------------------------------------------------------------------
// P2 with explicit subset rows (exponential; test-sized only).

struct P2Program {
  LinearProgram lp;  // variables x_1..x_dim, z_t
  std::vector<std::vector<std::size_t>> subsets;
};

inline P2Program build_p2_explicit(const MultiObjectiveProblem& problem, const IterationLedger& ledger,
                                   std::size_t subset_cap = 6) {
  const auto& l = problem.as_linear();
  const std::size_t n = l.objectives.size();
  const std::size_t t = ledger.t();
  if (n > subset_cap) throw InputError("too many objectives for explicit subset rows");
  if (t > n) throw InputError("iteration exceeds number of objectives");
  P2Program out;
  auto& lp = out.lp;
  lp = LinearProgram(l.dim + 1, Direction::maximize);
  for (std::size_t j = 0; j < l.dim; ++j) lp.bounds[j] = l.bounds[j];
  lp.objective[l.dim] = 1.0;
  lp.bounds[l.dim] = Bound<double>::free();
  append_region_rows(lp, l);

  // Non-empty subsets of size <= t in lexicographic order.
  std::vector<std::size_t> cur;
  auto emit = [&](auto&& self, std::size_t start) -> void {
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      std::vector<double> row(l.dim + 1, 0.0);
      for (std::size_t j : cur)
        for (std::size_t d = 0; d < l.dim; ++d) row[d] += l.objectives[j][d];
      if (cur.size() < t) {
        lp.add_constraint(std::move(row), Relation::greater_equal, ledger.prefix(cur.size()));
      } else {
        row[l.dim] = -1.0;
        lp.add_constraint(std::move(row), Relation::greater_equal, ledger.prefix(t - 1));
      }
      out.subsets.push_back(cur);
      if (cur.size() < t) self(self, i + 1);
      cur.pop_back();
    }
  };
  emit(emit, 0);
  return out;
}

}  // namespace leximin
