#pragma once

// The ordered-outcomes loop, OP procedures (exact, noisy, randomized, scripted),
// result verification, and the saturation algorithm.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "leximin/core.hpp"
#include "leximin/errors.hpp"
#include "leximin/linprog.hpp"
#include "leximin/programs.hpp"
#include "leximin/random.hpp"

namespace leximin {

template <class Sol>
struct BasicOpOutcome {
  Sol x;
  double z = 0.0;
};

using OpOutcome = BasicOpOutcome<Solution>;

/// What an OP promises: an (alpha, epsilon)-approximate optimum of each subproblem,
/// correct with probability p.
struct OpContract {
  ApproxFactors factors;
  double p = 1.0;

  OpContract() = default;
  OpContract(ApproxFactors f, double prob) : factors(f), p(prob) {
    if (!(p > 0.0 && p <= 1.0)) throw InputError("success probability must lie in (0, 1]");
  }
};

struct Op {
  std::function<OpOutcome(const MultiObjectiveProblem&, const IterationLedger&)> solve;
  OpContract contract;

  OpOutcome operator()(const MultiObjectiveProblem& p, const IterationLedger& l) const { return solve(p, l); }
};

template <class Sol>
struct BasicLeximinResult {
  Sol solution{};
  UtilityVector utilities;
  BasicIterationLedger<Sol> ledger;
  ApproxFactors claimed_factors;
  double claimed_probability = 1.0;
};

using LeximinResult = BasicLeximinResult<Solution>;

/// The loop itself: for t = 1..n, (x_t, z_t) <- op(z_1..z_{t-1}).
template <class Sol, class Fn>
BasicIterationLedger<Sol> ordered_outcomes(std::size_t n, Fn&& op) {
  BasicIterationLedger<Sol> ledger;
  for (std::size_t t = 1; t <= n; ++t) {
    BasicOpOutcome<Sol> out = op(std::as_const(ledger));
    ledger.record(out.z, std::move(out.x));
  }
  return ledger;
}

inline LeximinResult run_ordered_outcomes(const MultiObjectiveProblem& problem, const Op& op) {
  const std::size_t n = problem.num_objectives();
  auto ledger = ordered_outcomes<Solution>(n, [&](const IterationLedger& l) { return op(problem, l); });
  LeximinResult r;
  r.solution = ledger.witnesses.back();
  r.utilities = problem.utilities(r.solution);
  r.ledger = std::move(ledger);
  r.claimed_factors = factor_transform(op.contract.factors);
  r.claimed_probability = std::pow(op.contract.p, static_cast<double>(n));
  return r;
}

// ---------------------------------------------------------------------------
// Exact OPs.

inline Op exact_lp_op() {
  Op op;
  op.solve = [](const MultiObjectiveProblem& problem, const IterationLedger& ledger) {
    const auto p3 = build_p3(problem, ledger);
    const auto s = solve(p3.lp);
    if (s.status == LpStatus::unbounded) throw InputError("objectives are unbounded on the feasible region");
    if (s.status == LpStatus::infeasible) throw NumericalError("subproblem at iteration " + std::to_string(ledger.t()) + " is infeasible");
    std::vector<double> x(s.x.begin(), s.x.begin() + static_cast<std::ptrdiff_t>(p3.layout.dim));
    return OpOutcome{std::move(x), s.x[p3.layout.z()]};
  };
  return op;
}

inline Op exact_enum_op() {
  Op op;
  op.solve = [](const MultiObjectiveProblem& problem, const IterationLedger& ledger) {
    const auto& cands = problem.as_finite().candidates;
    std::optional<OpOutcome> best;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      double v;
      try {
        v = eval_p2compact_objective(problem, ledger, i);
      } catch (const InfeasibleError&) {
        continue;
      }
      if (!best || v > best->z) best = OpOutcome{i, v};
    }
    if (!best) throw NumericalError("no candidate satisfies the prefix constraints");
    return *best;
  };
  return op;
}

// ---------------------------------------------------------------------------
// Degraded OPs.

namespace detail {

// P2-Compact objective without the feasibility checks.
inline double p2compact_value(const MultiObjectiveProblem& problem, const IterationLedger& ledger,
                              const Solution& x) {
  auto v = problem.evaluate(x);
  std::stable_sort(v.begin(), v.end());
  double s = 0.0;
  for (std::size_t i = 0; i < ledger.t(); ++i) s += v[i];
  return s - ledger.prefix(ledger.t() - 1);
}

// A prefix-feasible point with low P2-Compact value: the best of minimizing each
// f_j and their sum over the prefix-feasible region.
inline std::optional<std::vector<double>> low_point(const MultiObjectiveProblem& problem,
                                                    const IterationLedger& ledger) {
  const auto& lin = problem.as_linear();
  auto p3 = build_p3(problem, ledger);
  std::optional<std::vector<double>> best;
  double best_value = std::numeric_limits<double>::infinity();
  const std::size_t n = lin.objectives.size();
  for (std::size_t j = 0; j <= n; ++j) {
    std::fill(p3.lp.objective.begin(), p3.lp.objective.end(), 0.0);
    for (std::size_t d = 0; d < lin.dim; ++d) {
      for (std::size_t i = 0; i < n; ++i)
        if (i == j || j == n) p3.lp.objective[d] -= lin.objectives[i][d];
    }
    const auto s = solve(p3.lp);
    if (!s.optimal()) continue;
    std::vector<double> x(s.x.begin(), s.x.begin() + static_cast<std::ptrdiff_t>(lin.dim));
    if (!check_p2compact_feasible(problem, ledger, x)) continue;
    const double v = p2compact_value(problem, ledger, x);
    if (v < best_value) {
      best_value = v;
      best = std::move(x);
    }
  }
  return best;
}

// A prefix-feasible point whose P2-Compact value is close to (not below) target,
// found on the segment between a low point and the optimum.
inline OpOutcome degrade_linear(const MultiObjectiveProblem& problem, const IterationLedger& ledger,
                                const OpOutcome& optimum, double target) {
  const auto& xs = MultiObjectiveProblem::point_of(optimum.x);
  const auto low = low_point(problem, ledger);
  if (!low) return optimum;
  const double low_value = p2compact_value(problem, ledger, *low);
  if (target <= low_value) return OpOutcome{*low, low_value};
  auto at = [&](double lambda) {
    std::vector<double> x(xs.size());
    for (std::size_t d = 0; d < xs.size(); ++d) x[d] = (*low)[d] + lambda * (xs[d] - (*low)[d]);
    return x;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (p2compact_value(problem, ledger, at(mid)) >= target) hi = mid;
    else lo = mid;
  }
  auto x = at(hi);
  const double z = p2compact_value(problem, ledger, x);
  if (z > optimum.z) return optimum;
  return OpOutcome{std::move(x), z};
}

// The feasible candidate with the smallest P2-Compact value that is >= target.
inline OpOutcome degrade_finite(const MultiObjectiveProblem& problem, const IterationLedger& ledger,
                                const OpOutcome& optimum, double target) {
  OpOutcome best = optimum;
  const auto& cands = problem.as_finite().candidates;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (!check_p2compact_feasible(problem, ledger, i)) continue;
    const double v = p2compact_value(problem, ledger, i);
    if (v >= target && v < best.z) best = OpOutcome{i, v};
  }
  return best;
}

}  // namespace detail

/// Wraps an exact OP: each call samples a value uniformly from
/// [alpha * z* - epsilon, z*] and returns a feasible point attaining it.
inline Op noisy_op(Op inner, ApproxFactors f, std::uint64_t seed) {
  if (f == ApproxFactors{}) return inner;
  auto rng = std::make_shared<std::mt19937_64>(derive_seed(seed, "noisy-op"));
  Op op;
  op.contract = OpContract(f, inner.contract.p);
  op.solve = [inner = std::move(inner), f, rng](const MultiObjectiveProblem& problem, const IterationLedger& ledger) {
    const auto best = inner(problem, ledger);
    const double lo = f.alpha * best.z - f.epsilon;
    const double target = std::uniform_real_distribution<double>(lo, best.z)(*rng);
    return problem.is_finite() ? detail::degrade_finite(problem, ledger, best, target)
                               : detail::degrade_linear(problem, ledger, best, target);
  };
  return op;
}

struct OpStats {
  std::size_t calls = 0;
  std::size_t injected_failures = 0;
};

/// With probability 1 - p returns a feasible outcome that ignores the contract
/// (a random prefix-feasible candidate, or a low point for linear problems).
inline Op randomized_op(Op inner, double p, std::uint64_t seed, std::shared_ptr<OpStats> stats = nullptr) {
  Op op;
  op.contract = OpContract(inner.contract.factors, p);
  if (p == 1.0 && !stats) {
    op.solve = std::move(inner.solve);
    return op;
  }
  auto rng = std::make_shared<std::mt19937_64>(derive_seed(seed, "randomized-op"));
  op.solve = [inner = std::move(inner), p, rng, stats](const MultiObjectiveProblem& problem,
                                                       const IterationLedger& ledger) {
    const bool fail = std::uniform_real_distribution<double>(0.0, 1.0)(*rng) >= p;
    if (stats) {
      ++stats->calls;
      if (fail) ++stats->injected_failures;
    }
    if (!fail) return inner(problem, ledger);
    if (problem.is_finite()) {
      std::vector<std::size_t> feasible;
      for (std::size_t i = 0; i < problem.as_finite().candidates.size(); ++i)
        if (check_p2compact_feasible(problem, ledger, i)) feasible.push_back(i);
      const std::size_t pick =
          feasible[std::uniform_int_distribution<std::size_t>(0, feasible.size() - 1)(*rng)];
      return OpOutcome{pick, detail::p2compact_value(problem, ledger, pick)};
    }
    if (auto low = detail::low_point(problem, ledger)) {
      const double z = detail::p2compact_value(problem, ledger, *low);
      return OpOutcome{std::move(*low), z};
    }
    return inner(problem, ledger);
  };
  return op;
}

struct ScriptStep {
  double z = 0.0;
  Solution x;
};

/// Replays fixed (z_t, x_t) pairs, one per iteration.
inline Op scripted_op(std::vector<ScriptStep> steps, ApproxFactors declared) {
  Op op;
  op.contract = OpContract(declared, 1.0);
  op.solve = [steps = std::move(steps)](const MultiObjectiveProblem&, const IterationLedger& ledger) {
    if (ledger.t() > steps.size()) throw InputError("trace has fewer steps than objectives");
    const auto& s = steps[ledger.t() - 1];
    return OpOutcome{s.x, s.z};
  };
  return op;
}

// ---------------------------------------------------------------------------
// Verification.

struct Violation {
  std::size_t probe = 0;
  PreferenceWitness witness;
};

struct VerificationReport {
  std::vector<Violation> violations;
  std::vector<std::size_t> infeasible_probes;

  bool ok() const noexcept { return violations.empty(); }
};

/// Lists every probe that is f-leximin-preferred over the result's utilities.
inline VerificationReport verify_utilities(const UtilityVector& result, const std::vector<UtilityVector>& probes,
                                           const ApproxFactors& f, double tol = kDefaultTolerance) {
  VerificationReport rep;
  const auto sr = sort_outcomes(result);
  for (std::size_t i = 0; i < probes.size(); ++i)
    if (auto w = is_leximin_preferred(sort_outcomes(probes[i]), sr, f, tol)) rep.violations.push_back({i, *w});
  return rep;
}

inline VerificationReport verify_result(const LeximinResult& result, const MultiObjectiveProblem& problem,
                                        const std::vector<Solution>& probes, const ApproxFactors& f,
                                        double tol = kDefaultTolerance) {
  VerificationReport rep;
  const auto sr = sort_outcomes(result.utilities);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (!problem.contains(probes[i])) {
      rep.infeasible_probes.push_back(i);
      continue;
    }
    const auto u = problem.utilities(probes[i]);
    if (auto w = is_leximin_preferred(sort_outcomes(u), sr, f, tol)) rep.violations.push_back({i, *w});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Saturation algorithm.

/// Solves an LP and returns (x, optimal value). Injectable to simulate inexact solvers.
using SaturationBackend = std::function<std::pair<std::vector<double>, double>(const LinearProgram&)>;

inline SaturationBackend exact_saturation_backend() {
  return [](const LinearProgram& lp) {
    const auto s = solve(lp);
    if (!s.optimal()) throw NumericalError(std::string("saturation subproblem is ") + to_string(s.status));
    return std::make_pair(s.x, s.objective_value);
  };
}

/// Exact solve, then reports (1 - noise) times the optimal value.
inline SaturationBackend underreporting_backend(double noise) {
  return [noise](const LinearProgram& lp) {
    auto [x, v] = exact_saturation_backend()(lp);
    return std::make_pair(std::move(x), v * (1.0 - noise));
  };
}

enum class SaturationStatus { converged, iteration_cap_exceeded };

struct SaturationStep {
  std::size_t t = 0;
  double v = 0.0;                                  // next max-min value
  std::vector<std::pair<std::size_t, double>> tests;  // (objective, saturation-test value)
  std::vector<std::size_t> saturated;              // objectives saturated in this step
};

struct SaturationOutcome {
  SaturationStatus status = SaturationStatus::converged;
  std::vector<double> x;
  std::vector<double> z;  // per objective; NaN while unsaturated
  std::vector<SaturationStep> steps;
};

inline SaturationOutcome saturation_solve(const MultiObjectiveProblem& problem, std::size_t max_iter = 0,
                                          SaturationBackend op1 = exact_saturation_backend(),
                                          SaturationBackend op2 = exact_saturation_backend(),
                                          double tol = kDefaultTolerance) {
  const auto& lin = problem.as_linear();
  const std::size_t n = lin.objectives.size(), dim = lin.dim;
  if (max_iter == 0) max_iter = 10 * n;
  SaturationOutcome out;
  out.z.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<bool> sat(n, false);
  std::size_t num_sat = 0;

  // Variables (x, v); rows for S and the bounds of saturated objectives.
  auto base = [&]() {
    LinearProgram lp(dim + 1, Direction::maximize);
    for (std::size_t d = 0; d < dim; ++d) lp.bounds[d] = lin.bounds[d];
    lp.bounds[dim] = Bound<double>::free();
    lp.objective[dim] = 1.0;
    append_region_rows(lp, lin);
    for (std::size_t i = 0; i < n; ++i) {
      if (!sat[i]) continue;
      std::vector<double> row(dim + 1, 0.0);
      std::copy(lin.objectives[i].begin(), lin.objectives[i].end(), row.begin());
      lp.add_constraint(std::move(row), Relation::greater_equal, out.z[i]);
    }
    return lp;
  };
  auto objective_row = [&](std::size_t i, double v_coeff) {
    std::vector<double> row(dim + 1, 0.0);
    std::copy(lin.objectives[i].begin(), lin.objectives[i].end(), row.begin());
    row[dim] = v_coeff;
    return row;
  };

  for (std::size_t t = 1;; ++t) {
    if (t > max_iter) {
      out.status = SaturationStatus::iteration_cap_exceeded;
      return out;
    }
    SaturationStep step;
    step.t = t;
    auto lp1 = base();
    for (std::size_t i = 0; i < n; ++i)
      if (!sat[i]) lp1.add_constraint(objective_row(i, -1.0), Relation::greater_equal, 0.0);
    auto [x, v] = op1(lp1);
    step.v = v;
    out.x.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(dim));

    std::vector<std::size_t> newly;
    for (std::size_t k = 0; k < n; ++k) {
      if (sat[k]) continue;
      auto lp2 = base();
      for (std::size_t i = 0; i < n; ++i)
        if (!sat[i]) lp2.add_constraint(objective_row(i, 0.0), Relation::greater_equal, v);
      lp2.add_constraint(objective_row(k, -1.0), Relation::greater_equal, 0.0);
      const double vk = op2(lp2).second;
      step.tests.emplace_back(k, vk);
      if (std::abs(vk - v) <= tol * std::max(1.0, std::abs(v))) newly.push_back(k);
    }
    for (std::size_t k : newly) {
      sat[k] = true;
      out.z[k] = v;
      ++num_sat;
    }
    step.saturated = newly;
    out.steps.push_back(std::move(step));
    if (num_sat == n) return out;
  }
}

}  // namespace leximin
