#pragma once

// JSON schemas for LPs, multi-objective instances, allocation instances,
// scripted traces, probe sets and results.

#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "leximin/allocation.hpp"
#include "leximin/core.hpp"
#include "leximin/ellipsoid.hpp"
#include "leximin/errors.hpp"
#include "leximin/linprog.hpp"
#include "leximin/ordered_outcomes.hpp"
#include "leximin/programs.hpp"

namespace leximin::io {

using json = nlohmann::json;

/// Raised for unreadable files and documents that do not match a schema.
class SchemaError : public InputError {
 public:
  using InputError::InputError;
};

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path);
  out << dump(j);
}

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

template <class T>
T get(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string("field \"") + what + "\" has the wrong type");
  }
}

inline std::vector<double> numbers(const json& j, const char* what) { return get<std::vector<double>>(j, what); }

inline std::vector<std::vector<double>> matrix(const json& j, const char* what) {
  return get<std::vector<std::vector<double>>>(j, what);
}

// null means unbounded.
inline json bound_end(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::optional<double> parse_end(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_number()) throw SchemaError("bound entries must be numbers or null");
  return j.get<double>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Linear programs.

inline Relation parse_relation(const std::string& s) {
  if (s == "<=") return Relation::less_equal;
  if (s == "=" || s == "==") return Relation::equal;
  if (s == ">=") return Relation::greater_equal;
  throw SchemaError("unknown relation \"" + s + "\"");
}

inline const char* relation_name(Relation r) {
  switch (r) {
    case Relation::less_equal: return "<=";
    case Relation::equal: return "=";
    case Relation::greater_equal: return ">=";
  }
  return "?";
}

inline std::vector<Constraint<double>> parse_constraints(const json& j, std::size_t dim) {
  std::vector<Constraint<double>> out;
  if (!j.is_array()) throw SchemaError("\"constraints\" must be an array");
  for (const auto& c : j) {
    Constraint<double> row{detail::numbers(detail::field(c, "coeffs"), "coeffs"),
                           parse_relation(detail::get<std::string>(detail::field(c, "rel"), "rel")),
                           detail::get<double>(detail::field(c, "rhs"), "rhs")};
    if (row.coeffs.size() != dim) throw SchemaError("constraint row length differs from dimension");
    out.push_back(std::move(row));
  }
  return out;
}

inline std::vector<Bound<double>> parse_bounds(const json& j, std::size_t dim) {
  std::vector<Bound<double>> out;
  if (!j.is_array() || j.size() != dim) throw SchemaError("\"bounds\" must list one [lo, hi] pair per variable");
  for (const auto& b : j) {
    if (!b.is_array() || b.size() != 2) throw SchemaError("each bound is a [lo, hi] pair");
    Bound<double> bd;
    bd.lower = detail::parse_end(b[0]);
    bd.upper = detail::parse_end(b[1]);
    out.push_back(bd);
  }
  return out;
}

inline json constraints_to_json(const std::vector<Constraint<double>>& rows) {
  json out = json::array();
  for (const auto& c : rows) out.push_back({{"coeffs", c.coeffs}, {"rel", relation_name(c.rel)}, {"rhs", c.rhs}});
  return out;
}

inline json bounds_to_json(const std::vector<Bound<double>>& bounds) {
  json out = json::array();
  for (const auto& b : bounds) out.push_back({detail::bound_end(b.lower), detail::bound_end(b.upper)});
  return out;
}

inline LinearProgram parse_lp(const json& j) {
  const auto dir = detail::get<std::string>(detail::field(j, "direction"), "direction");
  LinearProgram lp;
  if (dir == "maximize" || dir == "max")
    lp.direction = Direction::maximize;
  else if (dir == "minimize" || dir == "min")
    lp.direction = Direction::minimize;
  else
    throw SchemaError("direction must be \"maximize\" or \"minimize\"");
  lp.objective = detail::numbers(detail::field(j, "objective"), "objective");
  const std::size_t dim = lp.objective.size();
  lp.bounds.assign(dim, Bound<double>{});
  lp.names.assign(dim, std::string{});
  lp.constraints = parse_constraints(j.value("constraints", json::array()), dim);
  if (j.contains("bounds")) lp.bounds = parse_bounds(j.at("bounds"), dim);
  try {
    lp.validate();
  } catch (const InputError& e) {
    throw SchemaError(e.what());
  }
  return lp;
}

inline json lp_to_json(const LinearProgram& lp) {
  return {{"direction", lp.direction == Direction::maximize ? "maximize" : "minimize"},
          {"objective", lp.objective},
          {"constraints", constraints_to_json(lp.constraints)},
          {"bounds", bounds_to_json(lp.bounds)}};
}

inline json lp_solution_to_json(const LpSolution& s) {
  json j{{"status", to_string(s.status)}, {"pivots", s.pivots}, {"used_bland", s.used_bland}};
  if (s.optimal()) {
    j["x"] = s.x;
    j["objective"] = s.objective_value;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Multi-objective instances.

inline MultiObjectiveProblem parse_problem(const json& j) {
  const auto kind = detail::get<std::string>(detail::field(j, "kind"), "kind");
  try {
    if (kind == "finite") {
      std::vector<UtilityVector> cands;
      for (const auto& row : detail::matrix(detail::field(j, "candidates"), "candidates"))
        cands.emplace_back(row);
      return MultiObjectiveProblem::finite(std::move(cands));
    }
    if (kind == "linear") {
      auto objectives = detail::matrix(detail::field(j, "objectives"), "objectives");
      if (objectives.empty()) throw SchemaError("\"objectives\" must not be empty");
      const std::size_t dim = j.contains("dim") ? detail::get<std::size_t>(j.at("dim"), "dim") : objectives[0].size();
      auto rows = parse_constraints(j.value("constraints", json::array()), dim);
      std::vector<Bound<double>> bounds;
      if (j.contains("bounds")) bounds = parse_bounds(j.at("bounds"), dim);
      return MultiObjectiveProblem::linear(dim, std::move(rows), std::move(objectives), std::move(bounds));
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const InputError& e) {
    throw SchemaError(e.what());
  }
  throw SchemaError("kind must be \"linear\" or \"finite\"");
}

inline json problem_to_json(const MultiObjectiveProblem& p) {
  if (p.is_finite()) {
    json c = json::array();
    for (const auto& u : p.as_finite().candidates) c.push_back(u.vector());
    return {{"kind", "finite"}, {"candidates", c}};
  }
  const auto& l = p.as_linear();
  return {{"kind", "linear"},
          {"dim", l.dim},
          {"constraints", constraints_to_json(l.constraints)},
          {"bounds", bounds_to_json(l.bounds)},
          {"objectives", l.objectives}};
}

inline json solution_to_json(const Solution& s) {
  if (std::holds_alternative<std::size_t>(s)) return std::get<std::size_t>(s);
  return std::get<std::vector<double>>(s);
}

inline Solution parse_solution(const json& j) {
  if (j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0)) return j.get<std::size_t>();
  return detail::numbers(j, "solution");
}

// ---------------------------------------------------------------------------
// Scripted traces: {"declared": {"alpha", "epsilon"}, "steps": [{"z": ..., "x": [...] | index}]}.

struct Trace {
  std::vector<ScriptStep> steps;
  ApproxFactors declared;
};

inline ApproxFactors parse_factors(const json& j) {
  try {
    return ApproxFactors(detail::get<double>(detail::field(j, "alpha"), "alpha"), j.value("epsilon", 0.0));
  } catch (const SchemaError&) {
    throw;
  } catch (const InputError& e) {
    throw SchemaError(e.what());
  }
}

inline json factors_to_json(const ApproxFactors& f) { return {{"alpha", f.alpha}, {"epsilon", f.epsilon}}; }

inline Trace parse_trace(const json& j) {
  Trace t;
  t.declared = j.contains("declared") ? parse_factors(j.at("declared")) : ApproxFactors();
  const auto& steps = detail::field(j, "steps");
  if (!steps.is_array()) throw SchemaError("\"steps\" must be an array");
  for (const auto& s : steps)
    t.steps.push_back({detail::get<double>(detail::field(s, "z"), "z"), parse_solution(detail::field(s, "x"))});
  return t;
}

inline json trace_to_json(const Trace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) steps.push_back({{"z", s.z}, {"x", solution_to_json(s.x)}});
  return {{"declared", factors_to_json(t.declared)}, {"steps", steps}};
}

// ---------------------------------------------------------------------------
// Results.

inline json ledger_to_json(const std::vector<double>& z) { return {{"z", z}}; }

inline std::vector<double> sorted_values(const UtilityVector& u) { return sort_outcomes(u).vector(); }

inline json result_to_json(const LeximinResult& r) {
  json witnesses = json::array();
  for (const auto& w : r.ledger.witnesses) witnesses.push_back(solution_to_json(w));
  return {{"solution", solution_to_json(r.solution)},
          {"utilities", r.utilities.vector()},
          {"sorted_utilities", sorted_values(r.utilities)},
          {"ledger", {{"z", r.ledger.z}, {"witnesses", witnesses}}},
          {"claimed_factors", factors_to_json(r.claimed_factors)},
          {"claimed_probability", r.claimed_probability}};
}

// ---------------------------------------------------------------------------
// Allocation instances and results.

inline AllocationInstance parse_allocation_instance(const json& j) {
  AllocationInstance inst;
  inst.n = detail::get<std::size_t>(detail::field(j, "n"), "n");
  inst.m = detail::get<std::size_t>(detail::field(j, "m"), "m");
  const auto& us = detail::field(j, "utilities");
  if (!us.is_array()) throw SchemaError("\"utilities\" must be an array");
  try {
    for (const auto& u : us) {
      const auto type = detail::get<std::string>(detail::field(u, "type"), "type");
      if (type == "additive")
        inst.utilities.push_back(std::make_shared<AdditiveValuation>(detail::numbers(detail::field(u, "values"), "values")));
      else if (type == "coverage")
        inst.utilities.push_back(std::make_shared<CoverageValuation>(
            detail::get<std::vector<std::vector<long long>>>(detail::field(u, "sets"), "sets")));
      else
        throw SchemaError("unknown utility type \"" + type + "\"");
    }
    inst.validate();
  } catch (const SchemaError&) {
    throw;
  } catch (const InputError& e) {
    throw SchemaError(e.what());
  }
  return inst;
}

inline json allocation_instance_to_json(const AllocationInstance& inst) {
  json us = json::array();
  for (const auto& u : inst.utilities) {
    if (auto a = std::dynamic_pointer_cast<const AdditiveValuation>(u))
      us.push_back({{"type", "additive"}, {"values", a->values()}});
    else if (auto c = std::dynamic_pointer_cast<const CoverageValuation>(u))
      us.push_back({{"type", "coverage"}, {"sets", c->sets()}});
    else
      throw SchemaError("valuation has no JSON form");
  }
  return {{"n", inst.n}, {"m", inst.m}, {"utilities", us}};
}

inline json distribution_to_json(const StochasticAllocation& d) {
  json support = json::array();
  for (const auto& [a, p] : d.support) support.push_back({{"owner", a.owner}, {"p", p}});
  return support;
}

inline StochasticAllocation parse_distribution(const json& support, std::size_t n, std::size_t m) {
  StochasticAllocation d;
  if (!support.is_array()) throw SchemaError("\"support\" must be an array");
  for (const auto& e : support) {
    SimpleAllocation a{detail::get<std::vector<std::size_t>>(detail::field(e, "owner"), "owner")};
    if (a.owner.size() != m) throw SchemaError("owner list length differs from m");
    for (std::size_t o : a.owner)
      if (o >= n) throw SchemaError("owner index out of range");
    d.support.emplace_back(std::move(a), detail::get<double>(detail::field(e, "p"), "p"));
  }
  try {
    d.validate();
  } catch (const InputError& e) {
    throw SchemaError(e.what());
  }
  return d;
}

inline json allocation_result_to_json(const AllocationResult& r, const std::string& utilitarian) {
  return {{"support", distribution_to_json(r.solution)},
          {"expected_utilities", r.utilities.vector()},
          {"sorted_utilities", sorted_values(r.utilities)},
          {"claimed_alpha", r.claimed_factors.alpha},
          {"claimed_factors", factors_to_json(r.claimed_factors)},
          {"claimed_probability", r.claimed_probability},
          {"ledger", ledger_to_json(r.ledger.z)},
          {"utilitarian", utilitarian}};
}

inline json cut_log_to_json(const CutLog& log) {
  json feas = json::array(), opt = json::array();
  for (const auto& c : log.feasibility) {
    json e{{"iteration", c.iteration}, {"row", c.row}, {"rhs", c.rhs}};
    e["column"] = c.column ? json(*c.column) : json(nullptr);
    feas.push_back(std::move(e));
  }
  for (const auto& c : log.optimality) opt.push_back({{"iteration", c.iteration}, {"value", c.value}});
  return {{"feasibility", feas}, {"optimality", opt}};
}

// ---------------------------------------------------------------------------
// Result utilities and probes for verification.

/// Utilities of a result document: "utilities" (multi-objective) or
/// "expected_utilities" (allocation).
inline UtilityVector result_utilities(const json& j) {
  try {
    if (j.contains("expected_utilities")) return UtilityVector(detail::numbers(j.at("expected_utilities"), "expected_utilities"));
    return UtilityVector(detail::numbers(detail::field(j, "utilities"), "utilities"));
  } catch (const SchemaError&) {
    throw;
  } catch (const InputError& e) {
    throw SchemaError(e.what());
  }
}

inline std::optional<ApproxFactors> result_claimed_factors(const json& j) {
  if (!j.contains("claimed_factors")) return std::nullopt;
  return parse_factors(j.at("claimed_factors"));
}

/// Probe document forms:
///   {"utilities": [[...], ...]}          explicit utility vectors
///   {"points": [[...], ...]}             points of a linear instance
///   {"indices": [...]}                   candidates of a finite instance
///   {"distributions": [[{owner, p}...]]} distributions of an allocation instance
///   a result document                    its own utilities
/// Any combination of the first four keys is accepted.
struct ProbeSet {
  std::vector<UtilityVector> utilities;
  std::vector<Solution> solutions;
  std::vector<StochasticAllocation> distributions;
};

inline ProbeSet parse_probes(const json& j) {
  ProbeSet p;
  const bool is_result = j.contains("expected_utilities") ||
                         (j.contains("utilities") && j.at("utilities").is_array() && !j.at("utilities").empty() &&
                          j.at("utilities")[0].is_number());
  if (is_result) {
    p.utilities.push_back(result_utilities(j));
    return p;
  }
  try {
    if (j.contains("utilities"))
      for (const auto& row : detail::matrix(j.at("utilities"), "utilities")) p.utilities.emplace_back(row);
  } catch (const InputError& e) {
    throw SchemaError(e.what());
  }
  if (j.contains("points"))
    for (const auto& row : detail::matrix(j.at("points"), "points")) p.solutions.emplace_back(row);
  if (j.contains("indices"))
    for (std::size_t i : detail::get<std::vector<std::size_t>>(j.at("indices"), "indices")) p.solutions.emplace_back(i);
  if (!j.contains("utilities") && !j.contains("points") && !j.contains("indices") && !j.contains("distributions"))
    throw SchemaError("probe file has no utilities, points, indices or distributions");
  return p;
}

/// Distributions need the instance size, so they are parsed separately.
inline std::vector<StochasticAllocation> parse_probe_distributions(const json& j, std::size_t n, std::size_t m) {
  std::vector<StochasticAllocation> out;
  if (!j.contains("distributions")) return out;
  for (const auto& d : j.at("distributions")) out.push_back(parse_distribution(d, n, m));
  return out;
}

inline json violation_to_json(const Violation& v, const UtilityVector& probe) {
  return {{"probe", v.probe}, {"k", v.witness.k}, {"margin", v.witness.margin}, {"utilities", probe.vector()}};
}

}  // namespace leximin::io
