#pragma once

// Command implementations behind the leximin CLI. Each returns a process exit
// code: 0 success/verified, 1 verification failure, 2 usage or schema error,
// 3 numerical or configuration failure.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "leximin/allocation.hpp"
#include "leximin/core.hpp"
#include "leximin/io.hpp"
#include "leximin/linprog.hpp"
#include "leximin/ordered_outcomes.hpp"
#include "leximin/programs.hpp"
#include "leximin/random.hpp"

namespace leximin::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2, kNumerical = 3 };

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;
  std::string trace;
  std::string result;
  std::string probes;
  std::string dump_cuts;
  std::uint64_t seed = 0;
  std::optional<double> alpha;
  std::optional<double> epsilon;
  double p = 1.0;
  std::string op = "exact";
  std::string utilitarian = "greedy";
  double tolerance = kDefaultTolerance;
  std::size_t max_iter = 0;
  double noise = 0.02;
  std::size_t cap = 4096;
  double radius = 0.0;          // ellipsoid R; 0 picks the default
  std::size_t iterations = 0;   // ellipsoid K; 0 picks the default
  double radius_safety = C2Config{}.radius_safety;

  /// (alpha, epsilon) from flags, defaulting to (1, 0).
  ApproxFactors factors() const { return ApproxFactors(alpha.value_or(1.0), epsilon.value_or(0.0)); }

  void validate() const {
    factors();
    if (!(p > 0.0 && p <= 1.0)) throw InputError("--p must lie in (0, 1]");
    if (!(tolerance >= 0.0)) throw InputError("--tolerance must be >= 0");
    if (!(noise >= 0.0 && noise < 1.0)) throw InputError("--noise must lie in [0, 1)");
    if (!(radius >= 0.0)) throw InputError("--radius must be >= 0");
    if (!(radius_safety > 0.0)) throw InputError("--radius-safety must be > 0");
    if (op != "exact" && op != "noisy" && op != "scripted") throw InputError("--op must be exact, noisy or scripted");
    if (utilitarian != "greedy" && utilitarian != "bruteforce")
      throw InputError("--utilitarian must be greedy or bruteforce");
  }
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

inline std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt(v[i]);
  return out;
}

// JSON goes to --output when given (table to `out`); otherwise JSON to `out`
// and the table to `err`.
inline void emit(const RunConfig& cfg, const io::json& doc, const std::string& table, std::ostream& out,
                 std::ostream& err) {
  if (cfg.output.empty()) {
    out << io::dump(doc);
    err << table;
  } else {
    io::write_json(cfg.output, doc);
    out << table;
  }
}

inline std::string ledger_table(const std::vector<double>& z, const UtilityVector& u, const ApproxFactors& f,
                                double prob) {
  std::ostringstream s;
  s << "t\tz_t\n";
  for (std::size_t i = 0; i < z.size(); ++i) s << i + 1 << "\t" << fmt(z[i]) << "\n";
  s << "sorted utilities: " << join(sort_outcomes(u).vector()) << "\n";
  s << "claimed factors: alpha=" << fmt(f.alpha) << " epsilon=" << fmt(f.epsilon) << " probability=" << fmt(prob)
    << "\n";
  return s.str();
}

inline void require(const std::string& value, const char* flag) {
  if (value.empty()) throw io::SchemaError(std::string(flag) + " is required");
}

inline UtilitarianAlgorithm utilitarian_of(const RunConfig& cfg) {
  return cfg.utilitarian == "bruteforce" ? bruteforce_algorithm(cfg.cap) : greedy_algorithm();
}

inline C2Config c2_config(const RunConfig& cfg) {
  C2Config c;
  c.radius = cfg.radius;
  c.radius_safety = cfg.radius_safety;
  c.ellipsoid.iterations = cfg.iterations;
  return c;
}

inline bool is_allocation_instance(const io::json& j) { return j.is_object() && j.contains("n") && j.contains("m"); }

}  // namespace detail

inline Op build_op(const RunConfig& cfg, const MultiObjectiveProblem& problem) {
  Op op = problem.is_linear() ? exact_lp_op() : exact_enum_op();
  if (cfg.op == "noisy") {
    op = noisy_op(std::move(op), cfg.factors(), cfg.seed);
  } else if (cfg.op == "scripted") {
    detail::require(cfg.trace, "--trace");
    auto trace = io::parse_trace(io::read_json(cfg.trace));
    op = scripted_op(std::move(trace.steps), trace.declared);
  }
  if (cfg.p < 1.0) op = randomized_op(std::move(op), cfg.p, cfg.seed);
  return op;
}

inline int cmd_leximin(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::require(cfg.input, "--input");
  const auto problem = io::parse_problem(io::read_json(cfg.input));
  const auto r = run_ordered_outcomes(problem, build_op(cfg, problem));
  detail::emit(cfg, io::result_to_json(r),
               detail::ledger_table(r.ledger.z, r.utilities, r.claimed_factors, r.claimed_probability), out, err);
  return kOk;
}

inline int cmd_allocate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::require(cfg.input, "--input");
  const ValueOracle oracle(io::parse_allocation_instance(io::read_json(cfg.input)));
  const auto util = detail::utilitarian_of(cfg);
  AllocationDiagnostics diag;
  const auto r = solve_stochastic_leximin(oracle, util, detail::c2_config(cfg), &diag);
  if (!cfg.dump_cuts.empty()) {
    io::json its = io::json::array();
    for (std::size_t i = 0; i < diag.iterations.size(); ++i) {
      const auto& d = diag.iterations[i];
      its.push_back({{"t", i + 1},
                     {"radius", d.radius},
                     {"ellipsoid_iterations", d.ellipsoid_iterations},
                     {"dual_value", d.dual_value},
                     {"columns", d.columns},
                     {"cuts", io::cut_log_to_json(d.cuts)}});
    }
    io::write_json(cfg.dump_cuts, {{"iterations", its}});
  }
  std::ostringstream table;
  table << "utilitarian: " << util.name << "\n";
  table << detail::ledger_table(r.ledger.z, r.utilities, r.claimed_factors, r.claimed_probability);
  table << "support size: " << r.solution.support.size() << "\n";
  detail::emit(cfg, io::allocation_result_to_json(r, util.name), table.str(), out, err);
  return kOk;
}

/// Exit 0 iff no probe is leximin-preferred over the result under the factors
/// (flags, else the result's claimed factors, else exact).
inline int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::require(cfg.result, "--result");
  detail::require(cfg.probes, "--probes");
  const auto result_doc = io::read_json(cfg.result);
  const auto result = io::result_utilities(result_doc);
  ApproxFactors f = io::result_claimed_factors(result_doc).value_or(ApproxFactors());
  if (cfg.alpha || cfg.epsilon) f = ApproxFactors(cfg.alpha.value_or(f.alpha), cfg.epsilon.value_or(f.epsilon));

  const auto probe_doc = io::read_json(cfg.probes);
  auto probes = io::parse_probes(probe_doc);
  std::vector<std::string> skipped;
  const bool needs_instance = !probes.solutions.empty() || probe_doc.contains("distributions");
  if (needs_instance) {
    detail::require(cfg.input, "--input");
    const auto inst = io::read_json(cfg.input);
    if (detail::is_allocation_instance(inst)) {
      const ValueOracle oracle(io::parse_allocation_instance(inst));
      for (const auto& d : io::parse_probe_distributions(probe_doc, oracle.n(), oracle.m()))
        probes.utilities.emplace_back(expected_utilities(d, oracle));
      if (!probes.solutions.empty()) throw io::SchemaError("points/indices need a multi-objective instance");
    } else {
      const auto problem = io::parse_problem(inst);
      for (std::size_t i = 0; i < probes.solutions.size(); ++i) {
        if (!problem.contains(probes.solutions[i])) {
          skipped.push_back("solution probe " + std::to_string(i) + " is outside the feasible region");
          continue;
        }
        probes.utilities.push_back(problem.utilities(probes.solutions[i]));
      }
      if (probe_doc.contains("distributions")) throw io::SchemaError("distributions need an allocation instance");
    }
  }
  for (const auto& u : probes.utilities)
    if (u.size() != result.size()) throw io::SchemaError("probe length differs from result length");

  const auto rep = verify_utilities(result, probes.utilities, f, cfg.tolerance);
  io::json doc{{"factors", io::factors_to_json(f)},
               {"probes", probes.utilities.size()},
               {"verified", rep.ok()},
               {"skipped", skipped}};
  io::json vs = io::json::array();
  std::ostringstream table;
  table << "factors: alpha=" << detail::fmt(f.alpha) << " epsilon=" << detail::fmt(f.epsilon) << "\n";
  table << "probes checked: " << probes.utilities.size() << "\n";
  for (const auto& s : skipped) table << "skipped: " << s << "\n";
  for (const auto& v : rep.violations) {
    vs.push_back(io::violation_to_json(v, probes.utilities[v.probe]));
    table << "violation: probe " << v.probe << " (" << detail::join(probes.utilities[v.probe].vector())
          << ") k=" << v.witness.k << " margin=" << detail::fmt(v.witness.margin) << "\n";
  }
  doc["violations"] = vs;
  table << (rep.ok() ? "verified: no probe is preferred\n" : "verification failed\n");
  if (cfg.output.empty()) {
    out << table.str();
  } else {
    io::write_json(cfg.output, doc);
    out << table.str();
  }
  (void)err;
  return rep.ok() ? kOk : kVerificationFailed;
}

/// Index of the leximin-maximal candidate (first one among equals).
inline std::size_t finite_leximin_max(const FiniteObjectives& f) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < f.candidates.size(); ++i)
    if (leximin_compare(sort_outcomes(f.candidates[i]), sort_outcomes(f.candidates[best])) ==
        std::strong_ordering::greater)
      best = i;
  return best;
}

inline int cmd_bruteforce(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::require(cfg.input, "--input");
  const auto doc = io::read_json(cfg.input);
  if (detail::is_allocation_instance(doc)) {
    const ValueOracle oracle(io::parse_allocation_instance(doc));
    const auto r = brute_force_stochastic_leximin(oracle, cfg.cap);
    detail::emit(cfg, io::allocation_result_to_json(r, "enumeration"),
                 detail::ledger_table(r.ledger.z, r.utilities, r.claimed_factors, r.claimed_probability), out, err);
    return kOk;
  }
  const auto problem = io::parse_problem(doc);
  if (!problem.is_finite()) throw io::SchemaError("bruteforce needs a finite or allocation instance");
  const std::size_t best = finite_leximin_max(problem.as_finite());
  LeximinResult r;
  r.solution = best;
  r.utilities = problem.utilities(best);
  const auto sorted = sort_outcomes(r.utilities).vector();
  for (std::size_t i = 0; i < sorted.size(); ++i) r.ledger.record(sorted[i], Solution{best});
  detail::emit(cfg, io::result_to_json(r),
               detail::ledger_table(r.ledger.z, r.utilities, r.claimed_factors, r.claimed_probability), out, err);
  return kOk;
}

inline int cmd_solve_lp(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::require(cfg.input, "--input");
  const auto lp = io::parse_lp(io::read_json(cfg.input));
  const auto s = solve(lp);
  std::ostringstream table;
  table << "status: " << to_string(s.status) << "\n";
  if (s.optimal()) table << "objective: " << detail::fmt(s.objective_value) << "\nx: " << detail::join(s.x) << "\n";
  detail::emit(cfg, io::lp_solution_to_json(s), table.str(), out, err);
  return kOk;
}

/// f = (x1, x2) over x1 + x2 <= 1, x >= 0.
inline MultiObjectiveProblem saturation_demo_instance() {
  return MultiObjectiveProblem::linear(2, {Constraint<double>{{1, 1}, Relation::less_equal, 1}}, {{1, 0}, {0, 1}});
}

inline io::json saturation_to_json(const SaturationOutcome& o) {
  io::json steps = io::json::array();
  for (const auto& s : o.steps) {
    io::json tests = io::json::array();
    for (const auto& [k, v] : s.tests) tests.push_back({{"objective", k + 1}, {"value", v}});
    std::vector<std::size_t> sat;
    for (std::size_t k : s.saturated) sat.push_back(k + 1);
    steps.push_back({{"t", s.t}, {"v", s.v}, {"tests", tests}, {"saturated", sat}});
  }
  io::json z = io::json::array();
  for (double v : o.z) z.push_back(std::isnan(v) ? io::json(nullptr) : io::json(v));
  return {{"status", o.status == SaturationStatus::converged ? "converged" : "iteration_cap_exceeded"},
          {"x", o.x},
          {"z", z},
          {"steps", steps}};
}

inline std::string saturation_report(const char* title, const SaturationOutcome& o, std::size_t cap) {
  std::ostringstream s;
  s << "== " << title << " ==\n";
  for (const auto& st : o.steps) {
    s << "iteration " << st.t << ": v=" << detail::fmt(st.v);
    for (const auto& [k, v] : st.tests) s << "  test f" << k + 1 << "=" << detail::fmt(v);
    s << "  saturated:";
    if (st.saturated.empty()) s << " none";
    for (std::size_t k : st.saturated) s << " f" << k + 1;
    s << "\n";
  }
  if (o.status == SaturationStatus::converged) {
    s << "converged: x = (" << detail::join(o.x) << ")\n";
  } else {
    s << "iteration cap " << cap << " exceeded without saturating every objective\n";
  }
  return s.str();
}

inline int cmd_demo_saturation(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto problem = saturation_demo_instance();
  const std::size_t cap = cfg.max_iter ? cfg.max_iter : 10 * problem.num_objectives();
  const auto exact = saturation_solve(problem, cap, exact_saturation_backend(), exact_saturation_backend(),
                                      cfg.tolerance);
  io::json doc{{"exact", saturation_to_json(exact)}};
  std::string table = saturation_report("exact solver", exact, cap);
  if (cfg.noise > 0.0) {
    // Only the max-min solver is inexact; saturation tests stay exact.
    const auto noisy = saturation_solve(problem, cap, underreporting_backend(cfg.noise),
                                        exact_saturation_backend(), cfg.tolerance);
    doc["noisy"] = saturation_to_json(noisy);
    doc["noise"] = cfg.noise;
    table += saturation_report(("max-min solver reporting " + detail::fmt(1.0 - cfg.noise) + " of the optimum").c_str(),
                               noisy, cap);
  }
  if (cfg.output.empty()) {
    out << table;
  } else {
    io::write_json(cfg.output, doc);
    out << table;
  }
  (void)err;
  return kOk;
}

/// Dispatches on cfg.command and maps exceptions to exit codes.
inline int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    if (cfg.command == "leximin") return cmd_leximin(cfg, out, err);
    if (cfg.command == "allocate") return cmd_allocate(cfg, out, err);
    if (cfg.command == "check") return cmd_check(cfg, out, err);
    if (cfg.command == "bruteforce") return cmd_bruteforce(cfg, out, err);
    if (cfg.command == "solve-lp") return cmd_solve_lp(cfg, out, err);
    if (cfg.command == "demo-saturation") return cmd_demo_saturation(cfg, out, err);
    err << "error: unknown command " << cfg.command << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const InfeasibleError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const io::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace leximin::cli
