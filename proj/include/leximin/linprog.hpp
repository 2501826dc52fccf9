#pragma once

// Dense linear programs and a two-phase primal simplex.
//
// The solver is a template over the scalar type. `double` is the production
// instantiation; any exact field type with std::numeric_limits<T>::is_exact
// (e.g. boost::multiprecision::cpp_rational) runs with zero tolerances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "leximin/errors.hpp"

namespace leximin {

enum class Direction { maximize, minimize };
enum class Relation { less_equal, equal, greater_equal };
enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

template <class T>
struct ScalarTraits {
  static constexpr bool exact = std::numeric_limits<T>::is_exact;
  static T feasibility_tol() { return exact ? T(0) : T(1e-8); }
  static T optimality_tol() { return exact ? T(0) : T(1e-9); }
  static T pivot_tol() { return exact ? T(0) : T(1e-11); }
};

template <class T>
struct Bound {
  std::optional<T> lower = T(0);  // nullopt = -infinity
  std::optional<T> upper;         // nullopt = +infinity

  static Bound free() { return Bound{std::nullopt, std::nullopt}; }
  static Bound at_least(T lo) { return Bound{lo, std::nullopt}; }
  static Bound between(T lo, T up) { return Bound{lo, up}; }
};

template <class T>
struct Constraint {
  std::vector<T> coeffs;
  Relation rel = Relation::less_equal;
  T rhs = T(0);
};

template <class T>
struct BasicLinearProgram {
  Direction direction = Direction::maximize;
  std::vector<T> objective;
  std::vector<Constraint<T>> constraints;
  std::vector<Bound<T>> bounds;  // one per variable
  std::vector<std::string> names;

  BasicLinearProgram() = default;
  explicit BasicLinearProgram(std::size_t num_vars, Direction dir = Direction::maximize)
      : direction(dir), objective(num_vars, T(0)), bounds(num_vars), names(num_vars) {}

  std::size_t num_vars() const noexcept { return objective.size(); }
  std::size_t num_constraints() const noexcept { return constraints.size(); }

  std::size_t add_variable(T cost = T(0), Bound<T> bound = {}, std::string name = {}) {
    objective.push_back(cost);
    bounds.push_back(bound);
    names.push_back(std::move(name));
    for (auto& c : constraints) c.coeffs.push_back(T(0));
    return objective.size() - 1;
  }

  void add_constraint(std::vector<T> coeffs, Relation rel, T rhs) {
    if (coeffs.size() != num_vars()) throw InputError("constraint row length differs from variable count");
    constraints.push_back(Constraint<T>{std::move(coeffs), rel, rhs});
  }

  void validate() const {
    if (bounds.size() != num_vars()) throw InputError("bounds count differs from variable count");
    for (const auto& c : constraints)
      if (c.coeffs.size() != num_vars()) throw InputError("constraint row length differs from variable count");
    for (const auto& b : bounds)
      if (b.lower && b.upper && *b.lower > *b.upper) throw InputError("variable bound has lower > upper");
  }
};

template <class T>
struct BasicLpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<T> x;
  T objective_value = T(0);
  std::size_t pivots = 0;
  bool used_bland = false;

  bool optimal() const noexcept { return status == LpStatus::optimal; }
};

using LinearProgram = BasicLinearProgram<double>;
using LpSolution = BasicLpSolution<double>;

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  T s = T(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Largest violation of any row or bound at x (0 when feasible).
template <class T>
T max_violation(const BasicLinearProgram<T>& lp, const std::vector<T>& x) {
  T worst = T(0);
  auto upd = [&](T v) {
    if (v > worst) worst = v;
  };
  for (const auto& c : lp.constraints) {
    const T lhs = dot(c.coeffs, x);
    switch (c.rel) {
      case Relation::less_equal: upd(lhs - c.rhs); break;
      case Relation::greater_equal: upd(c.rhs - lhs); break;
      case Relation::equal: upd(lhs > c.rhs ? T(lhs - c.rhs) : T(c.rhs - lhs)); break;
    }
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.bounds[j].lower) upd(*lp.bounds[j].lower - x[j]);
    if (lp.bounds[j].upper) upd(x[j] - *lp.bounds[j].upper);
  }
  return worst;
}

namespace detail {

// Original variable expressed through non-negative internal columns:
// x = offset + sign * col (+ col_neg subtracted for split free variables).
template <class T>
struct VarMap {
  T offset = T(0);
  T sign = T(1);
  std::size_t col = 0;
  std::optional<std::size_t> col_neg;
};

template <class T>
class Simplex {
 public:
  explicit Simplex(const BasicLinearProgram<T>& lp) : lp_(lp) { lp_.validate(); }

  BasicLpSolution<T> solve() {
    build();
    BasicLpSolution<T> out;
    // Phase I: maximize -sum(artificials).
    if (num_artificial_ > 0) {
      std::vector<T> cost(ncols_, T(0));
      for (std::size_t j = first_artificial_; j < ncols_; ++j) cost[j] = T(-1);
      set_objective(cost);
      run(/*phase_one=*/true);
      if (objective_value() < -Tr::feasibility_tol()) {
        out.status = LpStatus::infeasible;
        out.pivots = pivots_;
        out.used_bland = bland_;
        return out;
      }
      drive_out_artificials();
    }
    std::vector<T> cost(ncols_, T(0));
    for (std::size_t j = 0; j < nx_; ++j) cost[j] = internal_cost_[j];
    set_objective(cost);
    const bool bounded = run(/*phase_one=*/false);
    out.pivots = pivots_;
    out.used_bland = bland_;
    if (!bounded) {
      out.status = LpStatus::unbounded;
      return out;
    }
    out.status = LpStatus::optimal;
    std::vector<T> internal(ncols_, T(0));
    for (std::size_t r = 0; r < rows_.size(); ++r) internal[basis_[r]] = rows_[r].back();
    out.x.assign(lp_.num_vars(), T(0));
    for (std::size_t j = 0; j < lp_.num_vars(); ++j) {
      const auto& vm = vars_[j];
      T v = vm.offset + vm.sign * internal[vm.col];
      if (vm.col_neg) v -= internal[*vm.col_neg];
      out.x[j] = v;
    }
    out.objective_value = dot(lp_.objective, out.x);
    return out;
  }

 private:
  using Tr = ScalarTraits<T>;

  void build() {
    const std::size_t n = lp_.num_vars();
    vars_.resize(n);
    nx_ = 0;
    std::vector<std::pair<std::size_t, T>> upper_rows;  // (internal col, bound on it)
    for (std::size_t j = 0; j < n; ++j) {
      const auto& b = lp_.bounds[j];
      auto& vm = vars_[j];
      if (b.lower) {
        vm.offset = *b.lower;
        vm.col = nx_++;
        if (b.upper) upper_rows.emplace_back(vm.col, *b.upper - *b.lower);
      } else if (b.upper) {
        vm.offset = *b.upper;
        vm.sign = T(-1);
        vm.col = nx_++;
      } else {
        vm.col = nx_++;
        vm.col_neg = nx_++;
      }
    }
    internal_cost_.assign(nx_, T(0));
    const T dir = lp_.direction == Direction::maximize ? T(1) : T(-1);
    for (std::size_t j = 0; j < n; ++j) {
      internal_cost_[vars_[j].col] += dir * vars_[j].sign * lp_.objective[j];
      if (vars_[j].col_neg) internal_cost_[*vars_[j].col_neg] -= dir * lp_.objective[j];
    }

    struct Row {
      std::vector<T> a;
      Relation rel;
      T b;
    };
    std::vector<Row> rows;
    for (const auto& c : lp_.constraints) {
      Row r{std::vector<T>(nx_, T(0)), c.rel, c.rhs};
      for (std::size_t j = 0; j < n; ++j) {
        if (c.coeffs[j] == T(0)) continue;
        const auto& vm = vars_[j];
        r.a[vm.col] += c.coeffs[j] * vm.sign;
        if (vm.col_neg) r.a[*vm.col_neg] -= c.coeffs[j];
        r.b -= c.coeffs[j] * vm.offset;
      }
      rows.push_back(std::move(r));
    }
    for (const auto& [col, ub] : upper_rows) {
      Row r{std::vector<T>(nx_, T(0)), Relation::less_equal, ub};
      r.a[col] = T(1);
      rows.push_back(std::move(r));
    }
    for (auto& r : rows) {
      if (r.b < T(0)) {
        for (auto& v : r.a) v = -v;
        r.b = -r.b;
        if (r.rel == Relation::less_equal) r.rel = Relation::greater_equal;
        else if (r.rel == Relation::greater_equal) r.rel = Relation::less_equal;
      }
    }

    std::size_t num_slack = 0;
    num_artificial_ = 0;
    for (const auto& r : rows) {
      if (r.rel != Relation::equal) ++num_slack;
      if (r.rel != Relation::less_equal) ++num_artificial_;
    }
    first_artificial_ = nx_ + num_slack;
    ncols_ = first_artificial_ + num_artificial_;

    rows_.assign(rows.size(), std::vector<T>(ncols_ + 1, T(0)));
    basis_.assign(rows.size(), 0);
    std::size_t slack = nx_, art = first_artificial_;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto& t = rows_[i];
      std::copy(rows[i].a.begin(), rows[i].a.end(), t.begin());
      t.back() = rows[i].b;
      switch (rows[i].rel) {
        case Relation::less_equal:
          t[slack] = T(1);
          basis_[i] = slack++;
          break;
        case Relation::greater_equal:
          t[slack++] = T(-1);
          t[art] = T(1);
          basis_[i] = art++;
          break;
        case Relation::equal:
          t[art] = T(1);
          basis_[i] = art++;
          break;
      }
    }
  }

  void set_objective(const std::vector<T>& cost) {
    cost_ = cost;
    obj_.assign(ncols_ + 1, T(0));
    for (std::size_t j = 0; j < ncols_; ++j) obj_[j] = cost[j];
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const T cb = cost[basis_[r]];
      if (cb == T(0)) continue;
      for (std::size_t j = 0; j <= ncols_; ++j) obj_[j] -= cb * rows_[r][j];
    }
  }

  T objective_value() const { return -obj_.back(); }

  void pivot(std::size_t r, std::size_t c) {
    auto& pr = rows_[r];
    const T p = pr[c];
    for (auto& v : pr) v /= p;
    pr[c] = T(1);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r) continue;
      const T f = rows_[i][c];
      if (f == T(0)) continue;
      auto& row = rows_[i];
      for (std::size_t j = 0; j <= ncols_; ++j) row[j] -= f * pr[j];
      row[c] = T(0);
      if constexpr (!Tr::exact) {
        if (row.back() < T(0) && row.back() > -Tr::feasibility_tol()) row.back() = T(0);
      }
    }
    const T f = obj_[c];
    if (f != T(0)) {
      for (std::size_t j = 0; j <= ncols_; ++j) obj_[j] -= f * pr[j];
      obj_[c] = T(0);
    }
    basis_[r] = c;
    ++pivots_;
  }

  bool eligible(std::size_t j, bool phase_one) const {
    return phase_one || j < first_artificial_;
  }

  // Returns false when the objective is unbounded.
  bool run(bool phase_one) {
    const std::size_t m = rows_.size();
    const std::size_t stall_limit = 3 * (m + ncols_);
    const std::size_t hard_limit = 50 * (m + ncols_) + 1000;
    std::size_t stalled = 0;
    std::size_t iterations = 0;
    while (true) {
      if (++iterations > hard_limit) throw NumericalError("simplex cycling guard exceeded");
      std::optional<std::size_t> enter;
      T best = Tr::optimality_tol();
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (!eligible(j, phase_one)) continue;
        if (obj_[j] > best) {
          enter = j;
          if (bland_) break;
          best = obj_[j];
        }
      }
      if (!enter) return true;

      std::optional<std::size_t> leave;
      T best_ratio = T(0);
      for (std::size_t i = 0; i < m; ++i) {
        const T a = rows_[i][*enter];
        if (!(a > Tr::pivot_tol())) continue;
        const T ratio = rows_[i].back() / a;
        if (!leave || ratio < best_ratio - Tr::pivot_tol() ||
            (!(ratio > best_ratio + Tr::pivot_tol()) && basis_[i] < basis_[*leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (!leave) return false;

      const T before = objective_value();
      pivot(*leave, *enter);
      if (objective_value() > before + Tr::optimality_tol()) {
        stalled = 0;
      } else if (++stalled >= stall_limit) {
        bland_ = true;
      }
    }
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < rows_.size();) {
      if (basis_[r] < first_artificial_) {
        ++r;
        continue;
      }
      std::optional<std::size_t> col;
      T best = Tr::pivot_tol();
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        const T a = rows_[r][j] < T(0) ? T(-rows_[r][j]) : rows_[r][j];
        if (a > best) {
          best = a;
          col = j;
        }
      }
      if (col) {
        pivot(r, *col);
        ++r;
      } else {
        // Redundant row.
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
      }
    }
  }

  BasicLinearProgram<T> lp_;
  std::vector<VarMap<T>> vars_;
  std::vector<T> internal_cost_;
  std::size_t nx_ = 0, ncols_ = 0, first_artificial_ = 0, num_artificial_ = 0;
  std::vector<std::vector<T>> rows_;
  std::vector<std::size_t> basis_;
  std::vector<T> obj_, cost_;
  std::size_t pivots_ = 0;
  bool bland_ = false;
};

}  // namespace detail

/// Solves the LP with Dantzig pricing, falling back to Bland's rule once
/// 3 * (rows + cols) consecutive pivots fail to improve the objective.
template <class T>
BasicLpSolution<T> solve(const BasicLinearProgram<T>& lp) {
  return detail::Simplex<T>(lp).solve();
}

/// Rewrites a general LP as  min c.x  s.t.  A x >= b, x >= 0.
/// Variables with negative or missing lower bounds are split into x+ - x-;
/// finite bounds become rows; <= rows are negated and = rows split in two.
/// For a maximization input the optimum of the result is minus the original optimum.
template <class T>
BasicLinearProgram<T> canonicalize(const BasicLinearProgram<T>& lp) {
  lp.validate();
  const std::size_t n = lp.num_vars();
  const T sign = lp.direction == Direction::maximize ? T(-1) : T(1);
  std::vector<std::size_t> pos(n);
  std::vector<std::optional<std::size_t>> neg(n);
  BasicLinearProgram<T> out;
  out.direction = Direction::minimize;
  for (std::size_t j = 0; j < n; ++j) {
    const std::string base = lp.names[j].empty() ? "x" + std::to_string(j) : lp.names[j];
    const bool split = !lp.bounds[j].lower || *lp.bounds[j].lower < T(0);
    pos[j] = out.add_variable(sign * lp.objective[j], {}, split ? base + "+" : base);
    if (split) neg[j] = out.add_variable(-sign * lp.objective[j], {}, base + "-");
  }
  auto expand = [&](const std::vector<T>& coeffs, T scale) {
    std::vector<T> row(out.num_vars(), T(0));
    for (std::size_t j = 0; j < n; ++j) {
      row[pos[j]] = scale * coeffs[j];
      if (neg[j]) row[*neg[j]] = -scale * coeffs[j];
    }
    return row;
  };
  for (const auto& c : lp.constraints) {
    if (c.rel != Relation::less_equal) out.add_constraint(expand(c.coeffs, T(1)), Relation::greater_equal, c.rhs);
    if (c.rel != Relation::greater_equal) out.add_constraint(expand(c.coeffs, T(-1)), Relation::greater_equal, -c.rhs);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<T> unit(n, T(0));
    unit[j] = T(1);
    const auto& b = lp.bounds[j];
    if (b.lower && (*b.lower > T(0) || neg[j])) out.add_constraint(expand(unit, T(1)), Relation::greater_equal, *b.lower);
    if (b.upper) out.add_constraint(expand(unit, T(-1)), Relation::greater_equal, -*b.upper);
  }
  return out;
}

/// The dual  max b.y  s.t.  A^T y <= c, y >= 0  of the canonical form of `lp`.
template <class T>
BasicLinearProgram<T> dual_of(const BasicLinearProgram<T>& lp) {
  const auto primal = canonicalize(lp);
  BasicLinearProgram<T> dual(primal.num_constraints(), Direction::maximize);
  for (std::size_t i = 0; i < primal.num_constraints(); ++i) {
    dual.objective[i] = primal.constraints[i].rhs;
    dual.names[i] = "y" + std::to_string(i);
  }
  for (std::size_t j = 0; j < primal.num_vars(); ++j) {
    std::vector<T> row(primal.num_constraints());
    for (std::size_t i = 0; i < primal.num_constraints(); ++i) row[i] = primal.constraints[i].coeffs[j];
    dual.add_constraint(std::move(row), Relation::less_equal, primal.objective[j]);
  }
  return dual;
}

}  // namespace leximin
