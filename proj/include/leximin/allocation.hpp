#pragma once

// Stochastic allocation of indivisible goods: value oracles, utilitarian
// welfare maximizers, the per-iteration program over allocation columns and
// its dual, and the end-to-end leximin pipeline.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leximin/core.hpp"
#include "leximin/ellipsoid.hpp"
#include "leximin/errors.hpp"
#include "leximin/linprog.hpp"
#include "leximin/ordered_outcomes.hpp"
#include "leximin/programs.hpp"

namespace leximin {

/// owner[item] = agent receiving the item.
struct SimpleAllocation {
  std::vector<std::size_t> owner;

  std::vector<std::size_t> bundle(std::size_t agent) const {
    std::vector<std::size_t> b;
    for (std::size_t i = 0; i < owner.size(); ++i)
      if (owner[i] == agent) b.push_back(i);
    return b;
  }

  friend auto operator<=>(const SimpleAllocation&, const SimpleAllocation&) = default;
};

// ---------------------------------------------------------------------------
// Valuations.

class Valuation {
 public:
  virtual ~Valuation() = default;
  /// u(bundle) for a sorted list of distinct item indices.
  virtual double value(std::span<const std::size_t> bundle) const = 0;
  virtual std::size_t num_items() const = 0;
};

class AdditiveValuation : public Valuation {
 public:
  explicit AdditiveValuation(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_)
      if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("additive item values must be finite and >= 0");
  }
  double value(std::span<const std::size_t> bundle) const override {
    double s = 0.0;
    for (std::size_t i : bundle) s += values_.at(i);
    return s;
  }
  std::size_t num_items() const override { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// Number of distinct elements covered by the items' sets.
class CoverageValuation : public Valuation {
 public:
  explicit CoverageValuation(std::vector<std::vector<long long>> sets) : sets_(std::move(sets)) {}
  double value(std::span<const std::size_t> bundle) const override {
    std::set<long long> covered;
    for (std::size_t i : bundle) covered.insert(sets_.at(i).begin(), sets_.at(i).end());
    return static_cast<double>(covered.size());
  }
  std::size_t num_items() const override { return sets_.size(); }
  const std::vector<std::vector<long long>>& sets() const noexcept { return sets_; }

 private:
  std::vector<std::vector<long long>> sets_;
};

struct AllocationInstance {
  std::size_t n = 0;  // agents
  std::size_t m = 0;  // items
  std::vector<std::shared_ptr<const Valuation>> utilities;

  void validate() const {
    if (n == 0) throw InputError("instance needs at least one agent");
    if (utilities.size() != n) throw InputError("one valuation per agent is required");
    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), 0);
    for (const auto& u : utilities) {
      if (!u) throw InputError("missing valuation");
      if (u->num_items() != m) throw InputError("valuation item count differs from m");
      if (!(u->value(all) > 0.0)) throw InputError("every agent must value the set of all items positively");
    }
  }
};

/// Memoized value oracle; counts evaluations of the underlying valuations.
class ValueOracle {
 public:
  explicit ValueOracle(AllocationInstance instance) : inst_(std::move(instance)) { inst_.validate(); }

  std::size_t n() const noexcept { return inst_.n; }
  std::size_t m() const noexcept { return inst_.m; }
  const AllocationInstance& instance() const noexcept { return inst_; }

  double value(std::size_t agent, std::vector<std::size_t> bundle) const {
    std::sort(bundle.begin(), bundle.end());
    bundle.erase(std::unique(bundle.begin(), bundle.end()), bundle.end());
    std::lock_guard<std::mutex> lock(mu_);
    ++queries_;
    auto key = std::make_pair(agent, std::move(bundle));
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    ++evaluations_;
    const double v = inst_.utilities.at(agent)->value(key.second);
    cache_.emplace(std::move(key), v);
    return v;
  }

  double value(std::size_t agent, const SimpleAllocation& a) const { return value(agent, a.bundle(agent)); }

  double value_of_all(std::size_t agent) const {
    std::vector<std::size_t> all(inst_.m);
    std::iota(all.begin(), all.end(), 0);
    return value(agent, std::move(all));
  }

  std::size_t evaluations() const {
    std::lock_guard<std::mutex> lock(mu_);
    return evaluations_;
  }
  std::size_t queries() const {
    std::lock_guard<std::mutex> lock(mu_);
    return queries_;
  }

 private:
  AllocationInstance inst_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<std::size_t, std::vector<std::size_t>>, double> cache_;
  mutable std::size_t evaluations_ = 0;
  mutable std::size_t queries_ = 0;
};

// ---------------------------------------------------------------------------
// Distributions over allocations.

struct StochasticAllocation {
  std::vector<std::pair<SimpleAllocation, double>> support;

  void validate(double tol = 1e-9) const {
    double s = 0.0;
    for (const auto& [a, p] : support) {
      if (p < -tol) throw InputError("negative probability in support");
      s += p;
    }
    if (std::abs(s - 1.0) > tol) throw InputError("probabilities do not sum to 1");
  }
};

inline double expected_utility(const StochasticAllocation& d, const ValueOracle& oracle, std::size_t agent) {
  double s = 0.0;
  for (const auto& [a, p] : d.support) s += p * oracle.value(agent, a);
  return s;
}

inline std::vector<double> expected_utilities(const StochasticAllocation& d, const ValueOracle& oracle) {
  std::vector<double> out(oracle.n());
  for (std::size_t j = 0; j < oracle.n(); ++j) out[j] = expected_utility(d, oracle, j);
  return out;
}

/// n^m, or throws when it exceeds cap.
inline std::size_t allocation_count(std::size_t n, std::size_t m, std::size_t cap) {
  std::size_t c = 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (c > cap / n) throw InputError("number of allocations exceeds cap " + std::to_string(cap));
    c *= n;
  }
  if (c > cap) throw InputError("number of allocations exceeds cap " + std::to_string(cap));
  return c;
}

/// Calls f on every allocation in lexicographic order of owner vectors.
template <class F>
void for_each_allocation(std::size_t n, std::size_t m, std::size_t cap, F&& f) {
  const std::size_t total = allocation_count(n, m, cap);
  SimpleAllocation a{std::vector<std::size_t>(m, 0)};
  for (std::size_t c = 0; c < total; ++c) {
    f(std::as_const(a));
    for (std::size_t i = m; i-- > 0;) {
      if (++a.owner[i] < n) break;
      a.owner[i] = 0;
    }
  }
}

// ---------------------------------------------------------------------------
// Weighted utilitarian welfare  max_A Σ_j w_j u_j(A_j).

struct WelfareResult {
  SimpleAllocation allocation;
  double welfare = 0.0;
};

inline double weighted_welfare(const ValueOracle& oracle, const std::vector<double>& w, const SimpleAllocation& a) {
  double s = 0.0;
  for (std::size_t j = 0; j < oracle.n(); ++j)
    if (w[j] != 0.0) s += w[j] * oracle.value(j, a);
  return s;
}

/// Repeatedly gives the unassigned (agent, item) pair with the largest weighted
/// marginal gain; ties go to the lowest agent, then the lowest item.
inline WelfareResult greedy_utilitarian(const ValueOracle& oracle, const std::vector<double>& w) {
  const std::size_t n = oracle.n(), m = oracle.m();
  if (w.size() != n) throw InputError("one weight per agent is required");
  for (double x : w)
    if (x < 0.0) throw InputError("weights must be >= 0");
  std::vector<std::vector<std::size_t>> bundles(n);
  std::vector<double> current(n, 0.0);
  std::vector<bool> taken(m, false);
  SimpleAllocation a{std::vector<std::size_t>(m, 0)};
  for (std::size_t step = 0; step < m; ++step) {
    double best_gain = -1.0;
    std::size_t best_agent = 0, best_item = 0;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        if (taken[i]) continue;
        auto b = bundles[j];
        b.push_back(i);
        const double gain = w[j] * (oracle.value(j, std::move(b)) - current[j]);
        if (gain > best_gain) {
          best_gain = gain;
          best_agent = j;
          best_item = i;
        }
      }
    }
    taken[best_item] = true;
    a.owner[best_item] = best_agent;
    bundles[best_agent].push_back(best_item);
    current[best_agent] = oracle.value(best_agent, bundles[best_agent]);
  }
  return {a, weighted_welfare(oracle, w, a)};
}

/// Exhaustive maximum over all n^m allocations (first maximum in enumeration order).
inline WelfareResult bruteforce_utilitarian(const ValueOracle& oracle, const std::vector<double>& w,
                                            std::size_t cap = 4096) {
  if (w.size() != oracle.n()) throw InputError("one weight per agent is required");
  WelfareResult best;
  best.welfare = -1.0;
  for_each_allocation(oracle.n(), oracle.m(), cap, [&](const SimpleAllocation& a) {
    const double v = weighted_welfare(oracle, w, a);
    if (v > best.welfare) best = {a, v};
  });
  return best;
}

/// A weighted-welfare maximizer with approximation ratio alpha and success probability p.
struct UtilitarianAlgorithm {
  std::string name;
  std::function<WelfareResult(const ValueOracle&, const std::vector<double>&)> solve;
  double alpha = 1.0;
  double p = 1.0;
};

inline UtilitarianAlgorithm greedy_algorithm() { return {"greedy", greedy_utilitarian, 0.5, 1.0}; }

inline UtilitarianAlgorithm bruteforce_algorithm(std::size_t cap = 4096) {
  return {"bruteforce",
          [cap](const ValueOracle& o, const std::vector<double>& w) { return bruteforce_utilitarian(o, w, cap); }, 1.0,
          1.0};
}

// ---------------------------------------------------------------------------
// The dual program over v_{l,j} (q_l eliminated by q_l = (1/l) Σ_j v_{l,j}).

/// Constants S_l: Σ_{i<=l} z_i for l < t, and Σ_{i<t} z_i for l = t.
inline std::vector<double> prefix_constants(const std::vector<double>& z, std::size_t t) {
  std::vector<double> s(t, 0.0);
  double acc = 0.0;
  for (std::size_t l = 1; l <= t; ++l) {
    if (l < t) acc += z.at(l - 1);
    s[l - 1] = acc;
  }
  return s;
}

/// Dual point: v[l-1][j] >= 0 for l = 1..t.
struct DualPoint {
  std::vector<std::vector<double>> v;

  std::size_t t() const noexcept { return v.size(); }
  double q(std::size_t l) const {
    const auto& row = v.at(l - 1);
    return std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(l);
  }
  /// Total weight Σ_l v_{l,j} of agent j.
  double weight(std::size_t j) const {
    double s = 0.0;
    for (const auto& row : v) s += row.at(j);
    return s;
  }
};

/// Ellipsoid coordinates of the dual. Block l < n holds v_{l,1..n}. When t = n,
/// the constraints v_{n,j} <= q_n force v_{n,1} = ... = v_{n,n}, so block n is a
/// single coordinate w and the region stays full-dimensional.
struct DualLayout {
  std::size_t n = 0, t = 0;

  bool collapsed() const noexcept { return t == n; }
  std::size_t dim() const noexcept { return collapsed() ? (n - 1) * n + 1 : t * n; }
  std::size_t index(std::size_t l, std::size_t j) const { return l < n ? (l - 1) * n + j : (n - 1) * n; }

  DualPoint expand(const std::vector<double>& y) const {
    DualPoint p;
    p.v.assign(t, std::vector<double>(n, 0.0));
    for (std::size_t l = 1; l <= t; ++l)
      for (std::size_t j = 0; j < n; ++j) p.v[l - 1][j] = y.at(index(l, j));
    return p;
  }

  /// Row over the full t x n coordinates -> row over ellipsoid coordinates.
  std::vector<double> collapse_row(const std::vector<double>& full) const {
    std::vector<double> row(dim(), 0.0);
    for (std::size_t l = 1; l <= t; ++l)
      for (std::size_t j = 0; j < n; ++j) row[index(l, j)] += full[(l - 1) * n + j];
    return row;
  }

  /// Objective q_t.
  std::vector<double> objective() const {
    std::vector<double> b(dim(), 0.0);
    for (std::size_t j = 0; j < n; ++j) b[index(t, j)] += 1.0 / static_cast<double>(t);
    return b;
  }
};

/// Keeps a stable integer id per allocation seen.
class AllocationRegistry {
 public:
  std::size_t id(const SimpleAllocation& a) {
    auto [it, inserted] = ids_.emplace(a, list_.size());
    if (inserted) list_.push_back(a);
    return it->second;
  }
  const SimpleAllocation& at(std::size_t id) const { return list_.at(id); }
  std::size_t size() const noexcept { return list_.size(); }

 private:
  std::map<SimpleAllocation, std::size_t> ids_;
  std::vector<SimpleAllocation> list_;
};

/// Allocation row of the dual over the full t x n coordinates:
/// Σ_{l,j} (u_j(A) - S_l / l) v_{l,j} <= 1.
inline std::vector<double> allocation_row(const ValueOracle& oracle, const SimpleAllocation& a,
                                          const std::vector<double>& s) {
  const std::size_t n = oracle.n(), t = s.size();
  std::vector<double> row(t * n);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = oracle.value(j, a);
    for (std::size_t l = 1; l <= t; ++l) row[(l - 1) * n + j] = u - s[l - 1] / static_cast<double>(l);
  }
  return row;
}

/// Separation for the dual at iteration t = z.size() + 1. Rows are over the full
/// t x n coordinates. Checks v >= 0 and v_{l,j} <= q_l exactly, then asks the
/// utilitarian algorithm (`repetitions` times) for an allocation whose row
/// Σ_j w_j u_j(A) - Σ_l q_l S_l <= 1 is violated; w_j = Σ_l v_{l,j}.
inline SeparationResponse separation_oracle_d3(const DualPoint& point, const std::vector<double>& z,
                                               const ValueOracle& oracle, const UtilitarianAlgorithm& util,
                                               AllocationRegistry& registry, std::size_t repetitions = 1) {
  const std::size_t n = oracle.n(), t = z.size() + 1;
  if (point.t() != t) throw InputError("dual point has the wrong number of blocks");
  auto unit = [&](std::size_t l, std::size_t j) { return (l - 1) * n + j; };
  for (std::size_t l = 1; l <= t; ++l) {
    for (std::size_t j = 0; j < n; ++j) {
      if (point.v[l - 1][j] < 0.0) {
        std::vector<double> row(t * n, 0.0);
        row[unit(l, j)] = -1.0;
        return SeparationResponse::violated_by(std::move(row), 0.0);
      }
    }
  }
  for (std::size_t l = 1; l <= t; ++l) {
    const double q = point.q(l);
    for (std::size_t j = 0; j < n; ++j) {
      if (point.v[l - 1][j] > q) {
        std::vector<double> row(t * n, 0.0);
        for (std::size_t k = 0; k < n; ++k) row[unit(l, k)] = -1.0 / static_cast<double>(l);
        row[unit(l, j)] += 1.0;
        return SeparationResponse::violated_by(std::move(row), 0.0);
      }
    }
  }
  const auto s = prefix_constants(z, t);
  double kappa = 1.0;
  for (std::size_t l = 1; l <= t; ++l) kappa += point.q(l) * s[l - 1];
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = point.weight(j);
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto res = util.solve(oracle, w);
    const double nu = weighted_welfare(oracle, w, res.allocation);
    if (nu > kappa) {
      return SeparationResponse::violated_by(allocation_row(oracle, res.allocation, s), 1.0,
                                             registry.id(res.allocation));
    }
  }
  return SeparationResponse::approx_feasible();
}

// ---------------------------------------------------------------------------
// The per-iteration primal over allocation columns:
//   min Σ_A p'_A
//   l y'_l - Σ_j m'_{l,j} - S_l Σ_A p'_A >= 0   (l < t),  >= 1  (l = t)
//   m'_{l,j} - y'_l + Σ_A p'_A u_j(A) >= 0
//   p', m' >= 0, y' free.
// Scaling by z_t = 1 / Σ p' gives the program that maximizes z_t over distributions.

struct C2Layout {
  std::size_t n = 0, t = 0;
  std::size_t y(std::size_t l) const { return l - 1; }
  std::size_t m(std::size_t l, std::size_t j) const { return t + (l - 1) * n + j; }
  std::size_t num_base() const { return t + t * n; }
  std::size_t row_prefix(std::size_t l) const { return l - 1; }
  std::size_t row_pair(std::size_t l, std::size_t j) const { return t + (l - 1) * n + j; }
};

inline ColumnPrimal c2_primal(const std::vector<double>& z, const ValueOracle& oracle,
                              const AllocationRegistry& registry) {
  const std::size_t n = oracle.n(), t = z.size() + 1;
  const C2Layout lay{n, t};
  const auto s = prefix_constants(z, t);
  ColumnPrimal p;
  p.base = LinearProgram(lay.num_base(), Direction::minimize);
  for (std::size_t l = 1; l <= t; ++l) {
    p.base.bounds[lay.y(l)] = Bound<double>::free();
    p.base.names[lay.y(l)] = "y" + std::to_string(l);
    for (std::size_t j = 0; j < n; ++j) p.base.names[lay.m(l, j)] = "m" + std::to_string(l) + "_" + std::to_string(j + 1);
  }
  for (std::size_t l = 1; l <= t; ++l) {
    std::vector<double> row(lay.num_base(), 0.0);
    row[lay.y(l)] = static_cast<double>(l);
    for (std::size_t j = 0; j < n; ++j) row[lay.m(l, j)] = -1.0;
    p.base.add_constraint(std::move(row), Relation::greater_equal, l == t ? 1.0 : 0.0);
  }
  for (std::size_t l = 1; l <= t; ++l) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> row(lay.num_base(), 0.0);
      row[lay.m(l, j)] = 1.0;
      row[lay.y(l)] = -1.0;
      p.base.add_constraint(std::move(row), Relation::greater_equal, 0.0);
    }
  }
  p.column = [&oracle, &registry, s, lay](std::size_t id) {
    const auto& a = registry.at(id);
    PrimalColumn col;
    col.cost = 1.0;
    col.coeffs.assign(lay.num_base(), 0.0);
    for (std::size_t l = 1; l <= lay.t; ++l) col.coeffs[lay.row_prefix(l)] = -s[l - 1];
    for (std::size_t j = 0; j < lay.n; ++j) {
      const double u = oracle.value(j, a);
      for (std::size_t l = 1; l <= lay.t; ++l) col.coeffs[lay.row_pair(l, j)] = u;
    }
    return col;
  };
  return p;
}

struct C2Solution {
  std::vector<std::pair<SimpleAllocation, double>> p;  // nonzero p'_A
  std::vector<double> y;                               // y'_1..y'_t
  std::vector<std::vector<double>> m;                  // m'[l-1][j]
  std::vector<double> z_scaled;                        // z'_i = z_i Σ p'
  double mass = 0.0;                                   // Σ p'_A

  double z_t() const {
    if (!(mass > 0.0)) throw InputError("C2 solution has zero mass");
    return 1.0 / mass;
  }
};

/// Distribution and auxiliaries of the program that maximizes z_t directly.
struct C1Solution {
  StochasticAllocation distribution;
  std::vector<double> y;
  std::vector<std::vector<double>> m;
  double z_t = 0.0;
};

/// z_t = 1 / Σ p'_A; every variable is multiplied by z_t.
inline C1Solution c2_to_c1(const C2Solution& s) {
  const double zt = s.z_t();
  C1Solution out;
  out.z_t = zt;
  for (const auto& [a, p] : s.p) out.distribution.support.emplace_back(a, p * zt);
  for (double v : s.y) out.y.push_back(v * zt);
  for (const auto& row : s.m) {
    out.m.emplace_back();
    for (double v : row) out.m.back().push_back(v * zt);
  }
  return out;
}

inline C2Solution c1_to_c2(const C1Solution& s, const std::vector<double>& z) {
  if (!(s.z_t > 0.0)) throw InputError("z_t must be positive");
  const double inv = 1.0 / s.z_t;
  C2Solution out;
  for (const auto& [a, p] : s.distribution.support) {
    out.p.emplace_back(a, p * inv);
    out.mass += p * inv;
  }
  for (double v : s.y) out.y.push_back(v * inv);
  for (const auto& row : s.m) {
    out.m.emplace_back();
    for (double v : row) out.m.back().push_back(v * inv);
  }
  for (double zi : z) out.z_scaled.push_back(zi * out.mass);
  return out;
}

struct C2Config {
  EllipsoidConfig ellipsoid;    // its radius is ignored; see `radius`
  double radius = 0.0;          // 0: default_dual_radius
  double radius_safety = 8.0;   // multiplier on the default radius
  bool seed_columns = true;     // add all-items-to-one-agent and previous supports as columns
};

struct C2Diagnostics {
  CutLog cuts;
  std::size_t ellipsoid_iterations = 0;
  double dual_value = 0.0;
  std::size_t columns = 0;
  double radius = 0.0;
};

/// Default initial radius: sqrt(dim) * max_j 1 / u_j(all items) * 2, times `safety`.
inline double default_dual_radius(const ValueOracle& oracle, std::size_t dim, double safety) {
  double inv = 0.0;
  for (std::size_t j = 0; j < oracle.n(); ++j) inv = std::max(inv, 1.0 / oracle.value_of_all(j));
  return safety * std::sqrt(static_cast<double>(dim)) * inv * 2.0;
}

inline SimpleAllocation everything_to(std::size_t agent, std::size_t m) {
  return SimpleAllocation{std::vector<std::size_t>(m, agent)};
}

/// Runs the ellipsoid on the dual, then solves the primal restricted to the
/// allocation columns found as cuts (plus seeds).
inline C2Solution solve_c2(const std::vector<double>& z, const ValueOracle& oracle, const UtilitarianAlgorithm& util,
                           const C2Config& cfg = {}, const std::vector<SimpleAllocation>& seeds = {},
                           C2Diagnostics* diag = nullptr) {
  const std::size_t n = oracle.n(), t = z.size() + 1;
  if (t > n) throw InputError("iteration exceeds number of agents");
  const DualLayout layout{n, t};
  AllocationRegistry registry;

  EllipsoidConfig ecfg = cfg.ellipsoid;
  ecfg.radius = cfg.radius > 0.0 ? cfg.radius : default_dual_radius(oracle, layout.dim(), cfg.radius_safety);
  if (!ecfg.center.empty() && ecfg.center.size() != layout.dim()) ecfg.center.clear();
  const std::size_t K = ecfg.iterations ? ecfg.iterations : default_iterations(layout.dim(), ecfg.r_ratio);
  ecfg.iterations = K;
  const std::size_t reps = repeat_count(util.p, n, K);

  SeparationOracle oracle_fn = [&](const std::vector<double>& y) {
    auto r = separation_oracle_d3(layout.expand(y), z, oracle, util, registry, reps);
    if (r.violated) r.row = layout.collapse_row(r.row);
    return r;
  };
  const auto er = ellipsoid_maximize(layout.objective(), oracle_fn, ecfg);

  std::vector<std::size_t> extra;
  if (cfg.seed_columns) {
    for (std::size_t j = 0; j < n; ++j) extra.push_back(registry.id(everything_to(j, oracle.m())));
    for (const auto& a : seeds) extra.push_back(registry.id(a));
  }
  const auto primal = c2_primal(z, oracle, registry);
  const auto reduced = recover_reduced_primal(primal, er.cuts, extra);
  const auto sol = solve(reduced.lp);
  if (!sol.optimal())
    throw NumericalError(std::string("reduced allocation program is ") + to_string(sol.status));
  const auto sparse = extend_with_zeros(sol, reduced);

  const C2Layout lay{n, t};
  C2Solution out;
  for (const auto& [id, v] : sparse.columns) {
    if (v <= 0.0) continue;
    out.p.emplace_back(registry.at(id), v);
    out.mass += v;
  }
  for (std::size_t l = 1; l <= t; ++l) {
    out.y.push_back(sparse.base[lay.y(l)]);
    out.m.emplace_back();
    for (std::size_t j = 0; j < n; ++j) out.m.back().push_back(sparse.base[lay.m(l, j)]);
  }
  for (double zi : z) out.z_scaled.push_back(zi * out.mass);
  if (diag) {
    diag->cuts = er.cuts;
    diag->ellipsoid_iterations = er.iterations;
    diag->dual_value = er.best_value;
    diag->columns = reduced.column_ids.size();
    diag->radius = ecfg.radius;
  }
  return out;
}

// ---------------------------------------------------------------------------
// End-to-end pipelines.

using AllocationResult = BasicLeximinResult<StochasticAllocation>;

struct AllocationDiagnostics {
  std::vector<C2Diagnostics> iterations;
};

inline std::vector<double> support_probabilities_clean(StochasticAllocation& d) {
  double s = 0.0;
  for (auto& [a, p] : d.support) s += p;
  std::vector<double> ps;
  for (auto& [a, p] : d.support) {
    p /= s;
    ps.push_back(p);
  }
  return ps;
}

/// Ordered outcomes with the column-generation OP. Claimed factors follow the
/// transform of (alpha, 0) of the utilitarian algorithm.
inline AllocationResult solve_stochastic_leximin(const ValueOracle& oracle, const UtilitarianAlgorithm& util,
                                                 const C2Config& cfg = {}, AllocationDiagnostics* diag = nullptr) {
  const std::size_t n = oracle.n();
  auto ledger = ordered_outcomes<StochasticAllocation>(
      n, [&](const BasicIterationLedger<StochasticAllocation>& l) {
        std::vector<SimpleAllocation> seeds;
        for (const auto& w : l.witnesses)
          for (const auto& [a, p] : w.support) seeds.push_back(a);
        C2Diagnostics d;
        const auto c2 = solve_c2(l.z, oracle, util, cfg, seeds, diag ? &d : nullptr);
        if (diag) diag->iterations.push_back(std::move(d));
        auto c1 = c2_to_c1(c2);
        support_probabilities_clean(c1.distribution);
        return BasicOpOutcome<StochasticAllocation>{std::move(c1.distribution), c1.z_t};
      });
  AllocationResult r;
  r.solution = ledger.witnesses.back();
  r.utilities = UtilityVector(expected_utilities(r.solution, oracle));
  r.ledger = std::move(ledger);
  r.claimed_factors = factor_transform(ApproxFactors(util.alpha, 0.0));
  r.claimed_probability = util.p;
  return r;
}

/// Reference solver: every allocation is a column and each iteration is solved
/// exactly by simplex.
inline AllocationResult brute_force_stochastic_leximin(const ValueOracle& oracle, std::size_t cap = 4096) {
  const std::size_t n = oracle.n();
  std::vector<SimpleAllocation> all;
  for_each_allocation(n, oracle.m(), cap, [&](const SimpleAllocation& a) { all.push_back(a); });
  const std::size_t N = all.size();
  std::vector<std::vector<double>> objectives(n, std::vector<double>(N));
  for (std::size_t c = 0; c < N; ++c)
    for (std::size_t j = 0; j < n; ++j) objectives[j][c] = oracle.value(j, all[c]);
  const auto problem = MultiObjectiveProblem::linear(
      N, {Constraint<double>{std::vector<double>(N, 1.0), Relation::equal, 1.0}}, std::move(objectives));
  const auto res = run_ordered_outcomes(problem, exact_lp_op());

  auto to_distribution = [&](const Solution& s) {
    StochasticAllocation d;
    const auto& x = MultiObjectiveProblem::point_of(s);
    for (std::size_t c = 0; c < N; ++c)
      if (x[c] > 1e-12) d.support.emplace_back(all[c], x[c]);
    support_probabilities_clean(d);
    return d;
  };
  AllocationResult r;
  for (std::size_t i = 0; i < res.ledger.z.size(); ++i) r.ledger.record(res.ledger.z[i], to_distribution(res.ledger.witnesses[i]));
  r.solution = r.ledger.witnesses.back();
  r.utilities = UtilityVector(expected_utilities(r.solution, oracle));
  r.claimed_factors = ApproxFactors();
  r.claimed_probability = 1.0;
  return r;
}

}  // namespace leximin
