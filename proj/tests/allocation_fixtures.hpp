#pragma once

// Small allocation instances and a reference leximin computation by saturation.
// The reference uses the simplex directly (tested on its own against vertex
// enumeration) but none of the ordered-outcomes machinery.

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "leximin/allocation.hpp"

namespace fixtures {

struct NamedInstance {
  std::string name;
  leximin::AllocationInstance instance;
};

inline leximin::AllocationInstance additive(std::vector<std::vector<double>> values) {
  leximin::AllocationInstance inst;
  inst.n = values.size();
  inst.m = values.front().size();
  for (auto& v : values) inst.utilities.push_back(std::make_shared<leximin::AdditiveValuation>(std::move(v)));
  return inst;
}

inline leximin::AllocationInstance coverage(std::vector<std::vector<std::vector<long long>>> sets) {
  leximin::AllocationInstance inst;
  inst.n = sets.size();
  inst.m = sets.front().size();
  for (auto& s : sets) inst.utilities.push_back(std::make_shared<leximin::CoverageValuation>(std::move(s)));
  return inst;
}

// Every instance has n^m <= 64.
inline std::vector<NamedInstance> allocation_corpus() {
  return {
      {"symmetric-2x1", additive({{1}, {1}})},
      {"disjoint-2x2", additive({{1, 0}, {0, 1}})},
      {"crossed-2x2", additive({{2, 1}, {1, 2}})},
      {"uneven-2x3", additive({{3, 1, 1}, {1, 1, 4}})},
      {"three-agents-3x2", additive({{1, 2}, {2, 1}, {1, 1}})},
      {"three-agents-3x3", additive({{4, 1, 0}, {1, 3, 1}, {0, 2, 5}})},
      {"coverage-2x3", coverage({{{1, 2}, {2, 3}, {4}}, {{1}, {1, 2, 3}, {3, 4}}})},
      {"four-agents-4x3", additive({{1, 1, 1}, {2, 0, 1}, {0, 3, 1}, {1, 1, 2}})},
      {"two-agents-2x6", additive({{5, 1, 2, 0, 3, 1}, {1, 4, 2, 3, 0, 2}})},
  };
}

// Leximin by saturation over explicit allocation columns. Returns the sorted
// optimal expected-utility vector.
inline std::vector<double> saturation_leximin(const leximin::ValueOracle& oracle, double tol = 1e-7) {
  using namespace leximin;
  const std::size_t n = oracle.n();
  std::vector<SimpleAllocation> all;
  for_each_allocation(n, oracle.m(), 4096, [&](const SimpleAllocation& a) { all.push_back(a); });
  const std::size_t N = all.size();
  std::vector<std::vector<double>> u(n, std::vector<double>(N));
  for (std::size_t c = 0; c < N; ++c)
    for (std::size_t j = 0; j < n; ++j) u[j][c] = oracle.value(j, all[c]);

  std::vector<double> fixed(n, -1.0);
  std::vector<bool> is_fixed(n, false);
  // Variables p_1..p_N, z.
  auto base = [&](double z_floor, bool z_var) {
    LinearProgram lp(N + 1);
    lp.bounds[N] = Bound<double>::free();
    std::vector<double> ones(N + 1, 1.0);
    ones[N] = 0.0;
    lp.add_constraint(ones, Relation::equal, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> row(u[j]);
      if (is_fixed[j]) {
        row.push_back(0.0);
        lp.add_constraint(row, Relation::greater_equal, fixed[j] - tol);
      } else if (z_var) {
        row.push_back(-1.0);
        lp.add_constraint(row, Relation::greater_equal, 0.0);
      } else {
        row.push_back(0.0);
        lp.add_constraint(row, Relation::greater_equal, z_floor - tol);
      }
    }
    return lp;
  };
  while (std::count(is_fixed.begin(), is_fixed.end(), false) > 0) {
    auto lp = base(0.0, true);
    lp.objective.assign(N + 1, 0.0);
    lp.objective[N] = 1.0;
    const auto s = solve(lp);
    if (!s.optimal()) throw NumericalError("saturation step failed");
    const double z = s.objective_value;
    bool any = false;
    std::vector<std::size_t> newly;
    for (std::size_t j = 0; j < n; ++j) {
      if (is_fixed[j]) continue;
      auto probe = base(z, false);
      probe.objective.assign(N + 1, 0.0);
      for (std::size_t c = 0; c < N; ++c) probe.objective[c] = u[j][c];
      const auto ps = solve(probe);
      if (!ps.optimal()) throw NumericalError("saturation probe failed");
      if (ps.objective_value <= z + 10 * tol) newly.push_back(j);
    }
    for (std::size_t j : newly) {
      is_fixed[j] = true;
      fixed[j] = z;
      any = true;
    }
    if (!any) throw NumericalError("no agent saturated");
  }
  std::sort(fixed.begin(), fixed.end());
  return fixed;
}

}  // namespace fixtures
