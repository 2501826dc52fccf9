#pragma once

// Central-cut ellipsoid method driven by an approximate separation oracle,
// and recovery of a primal solution from the constraints it cut with.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "leximin/errors.hpp"
#include "leximin/linprog.hpp"

namespace leximin {

/// Either a violated constraint row . y <= rhs (with row . y > rhs), or
/// "approximately feasible".
struct SeparationResponse {
  bool violated = false;
  std::vector<double> row;
  double rhs = 0.0;
  std::optional<std::size_t> column;  // primal column behind the row, if any

  static SeparationResponse approx_feasible() { return {}; }
  static SeparationResponse violated_by(std::vector<double> row, double rhs,
                                        std::optional<std::size_t> column = std::nullopt) {
    return {true, std::move(row), rhs, column};
  }
};

using SeparationOracle = std::function<SeparationResponse(const std::vector<double>& y)>;

/// Multiplicative slack beta of approximate-feasibility answers, and the
/// probability p that such an answer is correct.
struct OracleContract {
  double beta = 0.0;
  double p = 1.0;

  OracleContract() = default;
  OracleContract(double b, double prob) : beta(b), p(prob) {
    if (!(beta >= 0.0)) throw InputError("beta must be >= 0");
    if (!(p > 0.0 && p <= 1.0)) throw InputError("p must lie in (0, 1]");
  }
};

struct FeasibilityCut {
  std::size_t iteration = 0;
  std::vector<double> row;
  double rhs = 0.0;
  std::optional<std::size_t> column;
};

struct OptimalityCut {
  std::size_t iteration = 0;
  double value = 0.0;
};

struct CutLog {
  std::vector<FeasibilityCut> feasibility;
  std::vector<OptimalityCut> optimality;

  std::size_t size() const noexcept { return feasibility.size() + optimality.size(); }

  /// Distinct primal columns in order of discovery.
  std::vector<std::size_t> columns() const {
    std::vector<std::size_t> out;
    std::set<std::size_t> seen;
    for (const auto& c : feasibility)
      if (c.column && seen.insert(*c.column).second) out.push_back(*c.column);
    return out;
  }
};

struct EllipsoidConfig {
  std::vector<double> center;  // empty: origin
  double radius = 1.0;
  std::size_t iterations = 0;  // 0: default_iterations(d, r_ratio)
  double r_ratio = 1e-6;
  bool record_volume = false;
};

struct EllipsoidState {
  std::vector<double> center;
  std::vector<std::vector<double>> shape;  // E = {y : (y-c)^T shape^{-1} (y-c) <= 1}
  std::size_t iteration = 0;
};

struct EllipsoidResult {
  std::vector<double> best_point;
  double best_value = -std::numeric_limits<double>::infinity();
  std::size_t best_iteration = 0;
  std::size_t iterations = 0;
  CutLog cuts;
  std::vector<double> log_volume;  // 0.5 * log det(shape) per iteration, if recorded
  EllipsoidState final_state;
};

class NoFeasiblePoint : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// ceil(2 d (d+1) ln(R / r)) with r = r_ratio * R.
inline std::size_t default_iterations(std::size_t d, double r_ratio = 1e-6) {
  const double dd = static_cast<double>(d);
  return static_cast<std::size_t>(std::ceil(2.0 * dd * (dd + 1.0) * std::log(1.0 / r_ratio)));
}

namespace detail {

// log det of a symmetric positive definite matrix via Cholesky; -inf if not PD.
inline double log_det_spd(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double v = a[i][j];
      for (std::size_t k = 0; k < j; ++k) v -= l[i][k] * l[j][k];
      if (i == j) {
        if (v <= 0.0) return -std::numeric_limits<double>::infinity();
        l[i][i] = std::sqrt(v);
        s += std::log(l[i][i]);
      } else {
        l[i][j] = v / l[j][j];
      }
    }
  }
  return 2.0 * s;
}

}  // namespace detail

/// Maximizes b . y over the region described by `oracle`. Violated answers
/// trigger a cut through the center along the returned row; approximately
/// feasible answers trigger the cut b . y >= b . y_k. Returns the
/// approximately feasible center with the largest objective (earliest on ties).
inline EllipsoidResult ellipsoid_maximize(const std::vector<double>& b, const SeparationOracle& oracle,
                                          const EllipsoidConfig& cfg) {
  const std::size_t d = b.size();
  if (d == 0) throw InputError("ellipsoid needs at least one dimension");
  if (!(cfg.radius > 0.0)) throw InputError("initial radius must be positive");
  const std::size_t K = cfg.iterations ? cfg.iterations : default_iterations(d, cfg.r_ratio);

  EllipsoidState st;
  st.center = cfg.center.empty() ? std::vector<double>(d, 0.0) : cfg.center;
  if (st.center.size() != d) throw InputError("center dimension differs from objective");
  // The ellipsoid is kept as shape = B B^T and only B is updated, so the
  // shape stays positive semidefinite when it grows ill-conditioned.
  std::vector<std::vector<double>> B(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) B[i][i] = cfg.radius;
  auto shape_of = [&B, d] {
    std::vector<std::vector<double>> s(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double v = 0.0;
        for (std::size_t k = 0; k < d; ++k) v += B[i][k] * B[j][k];
        s[i][j] = s[j][i] = v;
      }
    return s;
  };

  EllipsoidResult res;
  const double dd = static_cast<double>(d);
  std::vector<double> g(d), a(d), pg(d);
  for (std::size_t k = 0; k < K; ++k) {
    st.iteration = k;
    if (cfg.record_volume) res.log_volume.push_back(0.5 * detail::log_det_spd(shape_of()));
    auto resp = oracle(st.center);
    if (resp.violated) {
      if (resp.row.size() != d) throw InputError("oracle row dimension differs");
      g = resp.row;
      res.cuts.feasibility.push_back({k, std::move(resp.row), resp.rhs, resp.column});
    } else {
      const double value = dot(b, st.center);
      if (value > res.best_value) {
        res.best_value = value;
        res.best_point = st.center;
        res.best_iteration = k;
      }
      res.cuts.optimality.push_back({k, value});
      for (std::size_t i = 0; i < d; ++i) g[i] = -b[i];
    }
    res.iterations = k + 1;

    // a = B^T g, pg = B a / |a| is the step direction scaled to the boundary.
    double gpg = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      a[k] = 0.0;
      for (std::size_t i = 0; i < d; ++i) a[k] += B[i][k] * g[i];
      gpg += a[k] * a[k];
    }
    if (!(gpg > 0.0) || !std::isfinite(gpg)) break;  // degenerate cut or collapsed ellipsoid
    const double norm = std::sqrt(gpg);
    for (auto& v : a) v /= norm;
    for (std::size_t i = 0; i < d; ++i) {
      pg[i] = 0.0;
      for (std::size_t k = 0; k < d; ++k) pg[i] += B[i][k] * a[k];
    }
    if (d == 1) {
      st.center[0] -= pg[0] / 2.0;
      B[0][0] /= 2.0;
    } else {
      for (std::size_t i = 0; i < d; ++i) st.center[i] -= pg[i] / (dd + 1.0);
      // B <- sqrt(scale) * B (I - (1 - sqrt(1 - w)) a a^T).
      const double scale = std::sqrt(dd * dd / (dd * dd - 1.0));
      const double shrink = 1.0 - std::sqrt(1.0 - 2.0 / (dd + 1.0));
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) B[i][k] = scale * (B[i][k] - shrink * pg[i] * a[k]);
    }
  }
  if (res.best_point.empty()) throw NoFeasiblePoint("no approximately feasible center found");
  st.shape = shape_of();
  res.final_state = std::move(st);
  return res;
}

/// Calls a randomized oracle T times and reports the first violation found.
inline std::size_t repeat_count(double p, std::size_t n, std::size_t I) {
  if (!(p > 0.0 && p <= 1.0)) throw InputError("p must lie in (0, 1]");
  if (n == 0 || I == 0) throw InputError("n and I must be positive");
  if (p == 1.0) return 1;
  const double x = std::log(static_cast<double>(n) * static_cast<double>(I)) / -std::log(1.0 - p);
  return 1 + static_cast<std::size_t>(std::max(0.0, std::ceil(x - 1e-12)));
}

inline SeparationOracle repeat_oracle(SeparationOracle base, double p, std::size_t n, std::size_t I) {
  const std::size_t T = repeat_count(p, n, I);
  if (T == 1) return base;
  return [base = std::move(base), T](const std::vector<double>& y) {
    for (std::size_t r = 0; r < T; ++r) {
      auto resp = base(y);
      if (resp.violated) return resp;
    }
    return SeparationResponse::approx_feasible();
  };
}

/// Oracle for {y : rows_i . y <= (1+beta) rhs_i, y >= 0}: nonnegativity is checked
/// exactly, the remaining rows with slack beta. Reports the most violated row.
inline SeparationOracle relaxed_row_oracle(std::vector<std::vector<double>> rows, std::vector<double> rhs,
                                           double beta, bool nonnegative = true) {
  return [rows = std::move(rows), rhs = std::move(rhs), beta, nonnegative](const std::vector<double>& y) {
    if (nonnegative) {
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 0.0) {
          std::vector<double> e(y.size(), 0.0);
          e[i] = -1.0;
          return SeparationResponse::violated_by(std::move(e), 0.0);
        }
      }
    }
    std::optional<std::size_t> worst;
    double worst_gap = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double gap = dot(rows[i], y) - (1.0 + beta) * rhs[i];
      if (gap > worst_gap) {
        worst_gap = gap;
        worst = i;
      }
    }
    if (!worst) return SeparationResponse::approx_feasible();
    return SeparationResponse::violated_by(rows[*worst], rhs[*worst], *worst);
  };
}

// ---------------------------------------------------------------------------
// Primal recovery.

/// Column of the primal for one generated variable.
struct PrimalColumn {
  double cost = 0.0;
  std::vector<double> coeffs;  // one per row of the base program
};

/// A minimization primal whose always-present variables and rows are in `base`
/// and whose remaining (possibly exponentially many) columns are produced on demand.
struct ColumnPrimal {
  LinearProgram base;
  std::function<PrimalColumn(std::size_t)> column;
};

struct ReducedPrimal {
  LinearProgram lp;
  std::vector<std::size_t> column_ids;
  std::size_t first_column = 0;  // index of the first generated variable in lp
};

/// The primal restricted to the columns that appeared as feasibility cuts
/// (plus `extra` ids), duplicates collapsed.
inline ReducedPrimal recover_reduced_primal(const ColumnPrimal& primal, const CutLog& log,
                                            const std::vector<std::size_t>& extra = {}) {
  if (primal.base.direction != Direction::minimize) throw InputError("column primal must be a minimization");
  ReducedPrimal out;
  out.lp = primal.base;
  out.first_column = out.lp.num_vars();
  std::set<std::size_t> seen;
  auto add = [&](std::size_t id) {
    if (!seen.insert(id).second) return;
    const auto col = primal.column(id);
    if (col.coeffs.size() != out.lp.num_constraints()) throw InputError("column length differs from row count");
    const std::size_t v = out.lp.add_variable(col.cost, {}, "col" + std::to_string(id));
    for (std::size_t r = 0; r < col.coeffs.size(); ++r) out.lp.constraints[r].coeffs[v] = col.coeffs[r];
    out.column_ids.push_back(id);
  };
  for (std::size_t id : log.columns()) add(id);
  for (std::size_t id : extra) add(id);
  return out;
}

struct SparsePrimal {
  std::vector<double> base;                             // always-present variables
  std::vector<std::pair<std::size_t, double>> columns;  // nonzero generated columns (id, value)
  double objective = 0.0;
};

/// Lifts a reduced solution to the full primal: columns absent from the reduced
/// program are zero and omitted.
inline SparsePrimal extend_with_zeros(const LpSolution& reduced, const ReducedPrimal& rp, double zero_tol = 1e-12) {
  if (!reduced.optimal()) throw InputError("reduced primal has no optimal solution");
  SparsePrimal out;
  out.base.assign(reduced.x.begin(), reduced.x.begin() + static_cast<std::ptrdiff_t>(rp.first_column));
  for (std::size_t i = 0; i < rp.column_ids.size(); ++i) {
    const double v = reduced.x[rp.first_column + i];
    if (std::abs(v) > zero_tol) out.columns.emplace_back(rp.column_ids[i], v);
  }
  out.objective = reduced.objective_value;
  return out;
}

}  // namespace leximin
